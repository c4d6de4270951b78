#include "fairmeta/task_cache.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairmeta/errors.hpp"

namespace fairmeta {

namespace {

constexpr const char* kMagic = "fairmeta-taskcache";
constexpr int kVersion = 1;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LineReader {
  std::istream& in;
  const std::string& path;
  int line_no = 0;

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in, line))
      throw DataError(path + ": truncated cache, expected " + std::string(what) + " after line " +
                      std::to_string(line_no));
    ++line_no;
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError(path + ":" + std::to_string(line_no) + ": " + msg);
  }
};

}  // namespace

void save_task_cache(const std::string& path, const std::vector<Dataset>& tasks) {
  if (tasks.empty()) throw std::invalid_argument("save_task_cache: empty task list");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << kMagic << ' ' << kVersion << '\n';
  out << tasks.size() << '\n';
  for (const Dataset& d : tasks) {
    validate(d);
    std::string tag = d.tag.empty() ? "-" : d.tag;
    for (char c : tag)
      if (std::isspace(static_cast<unsigned char>(c)))
        throw std::invalid_argument("save_task_cache: tag contains whitespace: " + d.tag);
    out << "task " << tag << ' ' << d.size() << ' ' << d.dim() << '\n';
    for (Index i = 0; i < d.size(); ++i) {
      for (Index j = 0; j < d.dim(); ++j) out << format_double(d.X(i, j)) << ' ';
      out << d.Y[i] << ' ' << d.A[i] << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<Dataset> load_task_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open task cache: " + path);
  LineReader r{in, path};

  std::istringstream header(r.next("header"));
  std::string magic;
  int version = 0;
  if (!(header >> magic >> version) || magic != kMagic)
    r.fail("not a task cache file (bad header)");
  if (version != kVersion) r.fail("unsupported cache version " + std::to_string(version));

  std::istringstream count_line(r.next("task count"));
  long count = 0;
  if (!(count_line >> count) || count < 1) r.fail("bad task count");

  std::vector<Dataset> tasks;
  tasks.reserve(count);
  for (long t = 0; t < count; ++t) {
    std::istringstream head(r.next("task header"));
    std::string kw, tag;
    Index n = 0, dim = 0;
    if (!(head >> kw >> tag >> n >> dim) || kw != "task" || n < 1 || dim < 1)
      r.fail("bad task header");
    Dataset d;
    d.tag = tag == "-" ? "" : tag;
    d.X.resize(n, dim);
    d.Y.resize(n);
    d.A.resize(n);
    for (Index i = 0; i < n; ++i) {
      std::istringstream row(r.next("data row"));
      for (Index j = 0; j < dim; ++j)
        if (!(row >> d.X(i, j))) r.fail("bad feature value");
      if (!(row >> d.Y[i] >> d.A[i])) r.fail("bad label/attribute");
      std::string extra;
      if (row >> extra) r.fail("trailing fields on data row");
    }
    validate(d);
    tasks.push_back(std::move(d));
  }
  return tasks;
}

}  // namespace fairmeta
