#include "noshow/solver.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

namespace noshow {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    default: return "UNKNOWN";
  }
}

const char* to_string(MusCore::Level level) {
  return level == MusCore::Level::Group ? "group" : "clause";
}

namespace {

std::string substitute(const std::string& tpl, const std::string& key, const std::string& value) {
  std::string out = tpl;
  const std::string pat = "{" + key + "}";
  size_t pos = 0;
  while ((pos = out.find(pat, pos)) != std::string::npos) {
    out.replace(pos, pat.size(), value);
    pos += value.size();
  }
  return out;
}

// Buffered integer scanner over a DIMACS-family file. Skips 'c' comment
// lines, the 'p' header, and '{g}' group prefixes where requested.
class DimacsScanner {
 public:
  explicit DimacsScanner(const std::string& path) : file_(std::fopen(path.c_str(), "rb")) {
    if (!file_) throw Error("cannot open " + path);
    refill();
  }
  ~DimacsScanner() {
    if (file_) std::fclose(file_);
  }

  // header must be read first; returns (vars, clauses, groups or 0)
  std::array<int64_t, 3> read_header() {
    for (;;) {
      skip_space();
      if (at_end()) throw Error("missing DIMACS header");
      char c = peek();
      if (c == 'c') {
        skip_line();
        continue;
      }
      if (c != 'p') throw Error("missing DIMACS header");
      skip_line_into(header_);
      break;
    }
    std::istringstream ss(header_);
    std::string p, fmt;
    int64_t vars = 0, clauses = 0, groups = 0;
    ss >> p >> fmt >> vars >> clauses;
    if (fmt == "gcnf") {
      if (!(ss >> groups)) throw Error("malformed gcnf header");
    } else if (fmt != "cnf") {
      throw Error("unsupported DIMACS format '" + fmt + "'");
    }
    return {vars, clauses, groups};
  }

  // next clause; returns false at end of file. group is -1 for plain cnf.
  bool next_clause(std::vector<int>& lits, int64_t& group) {
    lits.clear();
    group = -1;
    for (;;) {
      skip_space();
      if (at_end()) return false;
      char c = peek();
      if (c == 'c') {
        skip_line();
        continue;
      }
      if (c == '{') {
        get();
        group = read_int();
        skip_space();
        if (peek() == '}') get();
        continue;
      }
      break;
    }
    for (;;) {
      int64_t v = read_int();
      if (v == 0) return true;
      lits.push_back(static_cast<int>(v));
      skip_space();
      if (at_end()) throw Error("clause not terminated by 0");
    }
  }

 private:
  static constexpr size_t kBuf = 1 << 20;
  std::FILE* file_;
  std::array<char, kBuf> buf_;
  size_t len_ = 0, pos_ = 0;
  bool eof_ = false;
  std::string header_;

  void refill() {
    len_ = std::fread(buf_.data(), 1, kBuf, file_);
    pos_ = 0;
    if (len_ == 0) eof_ = true;
  }
  bool at_end() {
    if (pos_ < len_) return false;
    if (eof_) return true;
    refill();
    return pos_ >= len_;
  }
  char peek() { return buf_[pos_]; }
  char get() { return buf_[pos_++]; }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  void skip_line() {
    while (!at_end() && get() != '\n') {
    }
  }
  void skip_line_into(std::string& out) {
    out.clear();
    while (!at_end()) {
      char c = get();
      if (c == '\n') break;
      out.push_back(c);
    }
  }
  int64_t read_int() {
    skip_space();
    if (at_end()) throw Error("unexpected end of file");
    bool neg = false;
    char c = peek();
    if (c == '-') {
      neg = true;
      get();
    }
    if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
      throw Error("malformed integer in DIMACS input");
    int64_t v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
      v = v * 10 + (get() - '0');
    return neg ? -v : v;
  }
};

struct RunResult {
  int exit_code = -1;
  bool signalled = false;
  std::string output;
  double wall_seconds = 0.0;
};

RunResult run_command(const std::string& command) {
  auto start = std::chrono::steady_clock::now();
  std::FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) throw Error("cannot start command: " + command);
  RunResult r;
  std::array<char, 1 << 16> chunk;
  size_t got;
  while ((got = std::fread(chunk.data(), 1, chunk.size(), pipe)) > 0)
    r.output.append(chunk.data(), got);
  int status = pclose(pipe);
  if (WIFEXITED(status))
    r.exit_code = WEXITSTATUS(status);
  else
    r.signalled = true;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Parses "s ..." / "v ..." solver output lines into a verdict.
void parse_solver_text(const std::string& text, SolverVerdict& verdict, int64_t vars) {
  std::istringstream ss(text);
  std::string line;
  bool saw_status = false;
  while (std::getline(ss, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos) {
        verdict.status = SolveStatus::Unsat;
        saw_status = true;
      } else if (line.find("SATISFIABLE") != std::string::npos) {
        verdict.status = SolveStatus::Sat;
        saw_status = true;
      } else if (line.find("UNKNOWN") != std::string::npos) {
        verdict.status = SolveStatus::Unknown;
        saw_status = true;
      }
    } else if (line.rfind("v", 0) == 0 && (line.size() == 1 || line[1] == ' ')) {
      std::istringstream vs(line.substr(1));
      int64_t lit;
      while (vs >> lit) {
        if (lit == 0) continue;
        int64_t var = lit > 0 ? lit : -lit;
        if (var > vars) throw Error("model variable out of range");
        if (static_cast<int64_t>(verdict.model.size()) < vars + 1) verdict.model.resize(vars + 1, 0);
        verdict.model[var] = lit > 0 ? 1 : 0;
      }
    }
  }
  if (!saw_status) verdict.status = SolveStatus::Unknown;
}

}  // namespace

SolverVerdict solve(const std::string& cnf_path, const std::string& command_template,
                    std::optional<int> time_limit_seconds) {
  if (!std::filesystem::exists(cnf_path)) throw Error("instance file missing: " + cnf_path);
  if (command_template.find("{input}") == std::string::npos)
    throw Error("solver template lacks the {input} placeholder");

  int64_t vars = 0;
  {
    DimacsScanner scanner(cnf_path);
    vars = scanner.read_header()[0];
  }

  std::string command = substitute(command_template, "input", cnf_path);
  std::string result_path;
  if (command.find("{output}") != std::string::npos) {
    result_path = make_temp_path("solve-result");
    command = substitute(command, "output", result_path);
  }
  int limit = time_limit_seconds.value_or(7200);
  command = substitute(command, "time", std::to_string(limit));
  // hard wall-clock stop as a backstop for tools without native limits
  command = "timeout " + std::to_string(limit + 60) + " " + command;

  RunResult run = run_command(command);

  SolverVerdict verdict;
  verdict.solver = command_template;
  verdict.wall_seconds = run.wall_seconds;
  if (run.exit_code == 127) throw Error("solver executable missing: " + command_template);

  std::string text = run.output;
  if (!result_path.empty() && std::filesystem::exists(result_path)) {
    std::FILE* f = std::fopen(result_path.c_str(), "rb");
    if (f) {
      std::array<char, 1 << 16> chunk;
      size_t got;
      while ((got = std::fread(chunk.data(), 1, chunk.size(), f)) > 0) text.append(chunk.data(), got);
      std::fclose(f);
    }
    std::filesystem::remove(result_path);
  }

  parse_solver_text(text, verdict, vars);

  if (verdict.status == SolveStatus::Unknown) {
    // exit-code convention as a fallback when no status line was printed
    if (run.exit_code == 10)
      verdict.status = SolveStatus::Sat;
    else if (run.exit_code == 20)
      verdict.status = SolveStatus::Unsat;
    else if (run.exit_code == 124 || run.signalled)
      verdict.detail = "timeout";
    else
      verdict.detail = "no status line; exit code " + std::to_string(run.exit_code);
  }
  if (verdict.status == SolveStatus::Sat) {
    if (static_cast<int64_t>(verdict.model.size()) < vars + 1) verdict.model.resize(vars + 1, 0);
  } else {
    verdict.model.clear();
  }
  return verdict;
}

bool check_model(const std::string& cnf_path, const Model& model, std::string* first_violation) {
  DimacsScanner scanner(cnf_path);
  auto [vars, clause_count, groups] = scanner.read_header();
  if (static_cast<int64_t>(model.size()) < vars + 1)
    throw Error("model does not cover all " + std::to_string(vars) + " variables");
  std::vector<int> lits;
  int64_t group, seen = 0;
  while (scanner.next_clause(lits, group)) {
    ++seen;
    bool satisfied = false;
    for (int lit : lits) {
      int var = lit > 0 ? lit : -lit;
      if (var > vars) throw Error("literal out of range in clause " + std::to_string(seen));
      if ((lit > 0) == (model[var] != 0)) {
        satisfied = true;
        break;
      }
    }
    if (!satisfied) {
      if (first_violation) {
        std::string s = "clause " + std::to_string(seen) + ":";
        for (int lit : lits) s += " " + std::to_string(lit);
        *first_violation = s;
      }
      return false;
    }
  }
  if (seen != clause_count)
    throw Error("clause count mismatch: header " + std::to_string(clause_count) + ", found " +
                std::to_string(seen));
  return true;
}

CnfDocument read_dimacs(const std::string& path) {
  DimacsScanner scanner(path);
  auto [vars, clause_count, groups] = scanner.read_header();
  CnfDocument doc;
  doc.variables = vars;
  doc.groups = groups;
  std::vector<int> lits;
  int64_t group;
  while (scanner.next_clause(lits, group)) {
    doc.clauses.push_back(lits);
    doc.clause_groups.push_back(group);
  }
  if (static_cast<int64_t>(doc.clauses.size()) != clause_count)
    throw Error("clause count mismatch in " + path);
  return doc;
}

std::string file_digest(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw Error("cannot open " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  std::array<unsigned char, 1 << 16> chunk;
  size_t got;
  while ((got = std::fread(chunk.data(), 1, chunk.size(), f)) > 0)
    for (size_t i = 0; i < got; ++i) {
      h ^= chunk[i];
      h *= 0x100000001b3ULL;
    }
  std::fclose(f);
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string verdict_record(const std::string& digest, const SolverVerdict& verdict) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", verdict.wall_seconds);
  return "instance " + digest + " status " + to_string(verdict.status) + " time " + buf;
}

std::string make_temp_path(const std::string& tag) {
  static std::atomic<uint64_t> counter{0};
  auto dir = std::filesystem::temp_directory_path();
  uint64_t id = counter.fetch_add(1);
  return (dir / ("noshow-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(id)))
      .string();
}

namespace {

void write_cnf_subset(const CnfDocument& doc, const std::vector<size_t>& clause_indexes,
                      const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot open " + path + " for writing");
  std::string out = "p cnf " + std::to_string(doc.variables) + " " +
                    std::to_string(clause_indexes.size()) + "\n";
  for (size_t ci : clause_indexes) {
    for (int lit : doc.clauses[ci]) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
    if (out.size() > (1 << 20)) {
      std::fwrite(out.data(), 1, out.size(), f);
      out.clear();
    }
  }
  std::fwrite(out.data(), 1, out.size(), f);
  std::fclose(f);
}

}  // namespace

MusCore extract_mus(const std::string& gcnf_path, const std::string& tool_template,
                    MusCore::Level level, const std::string& solver_template, uint64_t seed) {
  if (!std::filesystem::exists(gcnf_path)) throw Error("instance file missing: " + gcnf_path);
  if (tool_template.find("{input}") == std::string::npos)
    throw Error("MUS tool template lacks the {input} placeholder");

  std::string core_path = make_temp_path("mus-core");
  std::string command = substitute(tool_template, "input", gcnf_path);
  command = substitute(command, "output", core_path);
  command = substitute(command, "level", to_string(level));
  command = substitute(command, "seed", std::to_string(seed));

  RunResult run = run_command(command);
  if (run.exit_code == 127) throw Error("MUS tool executable missing: " + tool_template);
  if (run.exit_code != 0 || !std::filesystem::exists(core_path))
    throw Error("MUS tool failed (exit " + std::to_string(run.exit_code) + ")");

  MusCore core;
  core.level = level;
  core.instance_digest = file_digest(gcnf_path);
  {
    std::FILE* f = std::fopen(core_path.c_str(), "rb");
    if (!f) throw Error("cannot open MUS core file");
    char line[256];
    bool have_header = false;
    while (std::fgets(line, sizeof line, f)) {
      std::string s(line);
      while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
      if (s.empty() || s[0] == '#') continue;
      if (!have_header) {
        if (s != std::string("level ") + to_string(level)) {
          std::fclose(f);
          throw Error("MUS core file has wrong level header: " + s);
        }
        have_header = true;
        continue;
      }
      core.members.push_back(std::stoull(s));
    }
    std::fclose(f);
  }
  std::filesystem::remove(core_path);
  if (core.members.empty()) throw Error("MUS tool returned an empty core");
  std::sort(core.members.begin(), core.members.end());
  core.members.erase(std::unique(core.members.begin(), core.members.end()), core.members.end());

  CnfDocument doc = read_dimacs(gcnf_path);

  auto member_clauses = [&](const std::vector<uint64_t>& members) {
    std::vector<size_t> out;
    if (level == MusCore::Level::Group) {
      std::vector<uint8_t> in_core(doc.groups + 1, 0);
      for (uint64_t g : members) {
        if (g == 0 || static_cast<int64_t>(g) > doc.groups) throw Error("core group id out of range");
        in_core[g] = 1;
      }
      for (size_t i = 0; i < doc.clauses.size(); ++i)
        if (doc.clause_groups[i] > 0 && in_core[doc.clause_groups[i]]) out.push_back(i);
    } else {
      for (uint64_t id : members) {
        if (id == 0 || id > doc.clauses.size()) throw Error("core clause id out of range");
        out.push_back(id - 1);
      }
    }
    return out;
  };

  std::vector<size_t> clause_indexes = member_clauses(core.members);
  for (size_t ci : clause_indexes) core.clauses.push_back(doc.clauses[ci]);

  // revalidation: the core alone must be UNSAT
  std::string sub_path = make_temp_path("mus-revalidate");
  write_cnf_subset(doc, clause_indexes, sub_path);
  SolverVerdict verdict = solve(sub_path, solver_template);
  std::filesystem::remove(sub_path);
  if (verdict.status != SolveStatus::Unsat) throw Error("unsound core");

  // minimality spot check: dropping one random member must give SAT
  if (core.members.size() > 1) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    size_t drop = rng() % core.members.size();
    std::vector<uint64_t> reduced = core.members;
    reduced.erase(reduced.begin() + drop);
    std::string red_path = make_temp_path("mus-minimality");
    write_cnf_subset(doc, member_clauses(reduced), red_path);
    SolverVerdict red = solve(red_path, solver_template);
    std::filesystem::remove(red_path);
    if (red.status != SolveStatus::Sat)
      throw Error("core failed the minimality spot check at member " +
                  std::to_string(core.members[drop]));
  }
  return core;
}

}  // namespace noshow
