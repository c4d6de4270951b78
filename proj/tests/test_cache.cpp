#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fairmeta/errors.hpp"
#include "fairmeta/task_cache.hpp"
#include "oracles.hpp"

using namespace fairmeta;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/fairmeta_cache_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& text) const {
    std::ofstream out(path);
    out << text;
  }
};

template <typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("save/load round-trips bit-exactly") {
  std::mt19937_64 rng(41);
  std::vector<Dataset> tasks;
  for (int t = 0; t < 5; ++t)
    tasks.push_back(oracle::random_dataset(10 + t, 3, rng, ("task-" + std::to_string(t)).c_str()));

  // salt in values that stress the printer: tiny, huge, negative zero, and
  // non-terminating decimals
  tasks[0].X(0, 0) = 0.1 + 0.2;
  tasks[0].X(0, 1) = 1.0 / 3.0;
  tasks[0].X(0, 2) = -0.0;
  tasks[0].X(1, 0) = 1e-300;
  tasks[0].X(1, 1) = -1e300;
  tasks[0].X(1, 2) = std::nextafter(1.0, 2.0);

  TempFile f("roundtrip.cache");
  save_task_cache(f.path, tasks);
  const std::vector<Dataset> back = load_task_cache(f.path);

  REQUIRE(back.size() == tasks.size());
  for (size_t t = 0; t < tasks.size(); ++t) {
    CHECK(back[t].tag == tasks[t].tag);
    REQUIRE(back[t].size() == tasks[t].size());
    REQUIRE(back[t].dim() == tasks[t].dim());
    CHECK((back[t].X.array() == tasks[t].X.array()).all());
    CHECK((back[t].Y.array() == tasks[t].Y.array()).all());
    CHECK((back[t].A.array() == tasks[t].A.array()).all());
  }

  // a second save of the loaded tasks reproduces the file byte for byte
  TempFile g("roundtrip2.cache");
  save_task_cache(g.path, back);
  std::ifstream a(f.path), b(g.path);
  const std::string text_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string text_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(text_a == text_b);
}

TEST_CASE("an empty tag survives as empty") {
  std::mt19937_64 rng(43);
  std::vector<Dataset> tasks = {oracle::random_dataset(4, 2, rng, "")};
  TempFile f("notag.cache");
  save_task_cache(f.path, tasks);
  CHECK(load_task_cache(f.path)[0].tag.empty());
}

TEST_CASE("save rejects unusable inputs") {
  CHECK_THROWS_AS(save_task_cache("/tmp/fairmeta_cache_none.cache", {}), std::invalid_argument);

  std::mt19937_64 rng(47);
  std::vector<Dataset> spaced = {oracle::random_dataset(4, 2, rng, "has space")};
  CHECK_THROWS_AS(save_task_cache("/tmp/fairmeta_cache_sp.cache", spaced), std::invalid_argument);

  std::vector<Dataset> fine = {oracle::random_dataset(4, 2, rng, "ok")};
  CHECK_THROWS_AS(save_task_cache("/nonexistent/dir/tasks.cache", fine), DataError);
}

TEST_CASE("load reports structural problems with their line number") {
  CHECK_THROWS_AS(load_task_cache("/nonexistent/tasks.cache"), DataError);

  TempFile empty("empty.cache");
  empty.write("");
  CHECK(message_of([&] { load_task_cache(empty.path); }).find("truncated") != std::string::npos);

  TempFile junk("junk.cache");
  junk.write("some other format 3\n1\n");
  CHECK(message_of([&] { load_task_cache(junk.path); }).find(":1:") != std::string::npos);

  TempFile vers("vers.cache");
  vers.write("fairmeta-taskcache 2\n1\n");
  const std::string vmsg = message_of([&] { load_task_cache(vers.path); });
  CHECK(vmsg.find(":1:") != std::string::npos);
  CHECK(vmsg.find("version") != std::string::npos);

  TempFile count("count.cache");
  count.write("fairmeta-taskcache 1\nzero\n");
  CHECK(message_of([&] { load_task_cache(count.path); }).find(":2:") != std::string::npos);

  TempFile zero("zerocount.cache");
  zero.write("fairmeta-taskcache 1\n0\n");
  CHECK(message_of([&] { load_task_cache(zero.path); }).find("bad task count") !=
        std::string::npos);

  TempFile head("taskhead.cache");
  head.write("fairmeta-taskcache 1\n1\nnottask t 1 2\n");
  CHECK(message_of([&] { load_task_cache(head.path); }).find(":3:") != std::string::npos);

  TempFile feat("feat.cache");
  feat.write("fairmeta-taskcache 1\n1\ntask t 1 2\nx 0.5 1 0\n");
  const std::string fmsg = message_of([&] { load_task_cache(feat.path); });
  CHECK(fmsg.find(":4:") != std::string::npos);
  CHECK(fmsg.find("feature") != std::string::npos);

  TempFile lab("label.cache");
  lab.write("fairmeta-taskcache 1\n1\ntask t 1 2\n0.5 0.5 y 0\n");
  CHECK(message_of([&] { load_task_cache(lab.path); }).find("label") != std::string::npos);

  TempFile extra("extra.cache");
  extra.write("fairmeta-taskcache 1\n1\ntask t 1 2\n0.5 0.5 1 0 99\n");
  CHECK(message_of([&] { load_task_cache(extra.path); }).find("trailing") != std::string::npos);

  TempFile cut("cut.cache");
  cut.write("fairmeta-taskcache 1\n1\ntask t 3 2\n0.5 0.5 1 0\n");
  const std::string cmsg = message_of([&] { load_task_cache(cut.path); });
  CHECK(cmsg.find("truncated") != std::string::npos);
  CHECK(cmsg.find("after line 4") != std::string::npos);

  TempFile fewer("fewer.cache");
  fewer.write("fairmeta-taskcache 1\n2\ntask t 1 2\n0.5 0.5 1 0\n");
  CHECK(message_of([&] { load_task_cache(fewer.path); }).find("truncated") != std::string::npos);

  // labels outside {0,1} fail dataset validation after parsing
  TempFile badlab("badlab.cache");
  badlab.write("fairmeta-taskcache 1\n1\ntask t 1 2\n0.5 0.5 2 0\n");
  CHECK_THROWS_AS(load_task_cache(badlab.path), std::invalid_argument);
}
