#pragma once

#include <string>
#include <vector>

#include "fairmeta/dataset.hpp"

namespace fairmeta {

// Versioned line-oriented text format, one row per line, floats printed with
// %.17g so a save/load cycle is bit-exact. Tags must be whitespace-free.
//
//   fairmeta-taskcache 1
//   <task count>
//   task <tag> <rows> <cols>
//   <x_0> ... <x_{d-1}> <y> <a>
//
// Any structural problem on load (missing file, bad header, truncation,
// malformed numbers) raises DataError with the offending line number.
void save_task_cache(const std::string& path, const std::vector<Dataset>& tasks);
std::vector<Dataset> load_task_cache(const std::string& path);

}  // namespace fairmeta
