// Orchestration of external SAT and MUS executables over DIMACS/GCNF files.
// No solver output is trusted unverified: models are replayed against the
// instance and cores are revalidated before anything downstream sees them.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noshow/core.hpp"

namespace noshow {

enum class SolveStatus { Sat, Unsat, Unknown };

const char* to_string(SolveStatus s);

// Assignment indexed by variable id; index 0 unused.
using Model = std::vector<uint8_t>;

struct SolverVerdict {
  SolveStatus status = SolveStatus::Unknown;
  Model model;  // populated iff status == Sat
  std::string solver;
  double wall_seconds = 0.0;
  std::string detail;  // timeout note, exit-code anomaly, ...
};

// Runs a solver command template over a DIMACS file. The template must
// contain {input}; {output} and {time} are optional placeholders for a result
// file and a time limit in seconds. Output is parsed for "s ..." status and
// "v ..." model lines; exit codes 10/20 are accepted as a fallback.
SolverVerdict solve(const std::string& cnf_path, const std::string& command_template,
                    std::optional<int> time_limit_seconds = std::nullopt);

// Streaming clause-by-clause replay of a model; constant memory. Returns true
// iff every clause has a true literal. Throws on variables out of range.
bool check_model(const std::string& cnf_path, const Model& model,
                 std::string* first_violation = nullptr);

// In-memory clause list for small and mid-size instances.
struct CnfDocument {
  int64_t variables = 0;
  int64_t groups = 0;  // 0 for plain CNF
  std::vector<int64_t> clause_groups;
  std::vector<std::vector<int>> clauses;
};
CnfDocument read_dimacs(const std::string& path);  // accepts cnf and gcnf

struct MusCore {
  enum class Level { Group, Clause };
  Level level = Level::Group;
  std::vector<uint64_t> members;          // 1-based group or clause ids
  std::string instance_digest;
  std::vector<std::vector<int>> clauses;  // literals of every core clause
};

const char* to_string(MusCore::Level level);

// Runs a MUS tool ({input}, {output}, {level}, {seed} placeholders), then
// revalidates: the core alone must be unsatisfiable and dropping one randomly
// chosen member must make it satisfiable.
MusCore extract_mus(const std::string& gcnf_path, const std::string& tool_template,
                    MusCore::Level level, const std::string& solver_template,
                    uint64_t seed = 1);

// 64-bit FNV-1a content digest, hex-encoded; manifest identity, not crypto.
std::string file_digest(const std::string& path);

// "instance <digest> status <S> time <secs>"
std::string verdict_record(const std::string& digest, const SolverVerdict& verdict);

std::string make_temp_path(const std::string& tag);

}  // namespace noshow
