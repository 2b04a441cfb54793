// Command-line front end: validate, enumerate, solve, check, double, homotopy.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ribbonbv/algebra.hpp"
#include "ribbonbv/algebra_io.hpp"
#include "ribbonbv/functional_io.hpp"
#include "ribbonbv/graphsum.hpp"
#include "ribbonbv/homotopy.hpp"
#include "ribbonbv/ribbon.hpp"

namespace {

using namespace ribbonbv;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

/// Usage, IO and window problems map to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int default_jobs() {
  if (const char* env = std::getenv("RIBBONBV_JOBS")) {
    try {
      int j = std::stoi(env);
      if (j >= 1) return j;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("RIBBONBV_JOBS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

AlgebraSpec load(const std::string& path, bool doubled) {
  AlgebraSpec spec = load_algebra(path);
  if (doubled) spec = double_algebra(spec);
  return spec;
}

std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

void print_report(const ValidationReport& r) {
  for (const auto& c : r.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.pass) {
      if (!c.witness.empty()) std::cout << " witness=" << join(c.witness);
      if (!c.detail.empty()) std::cout << " : " << c.detail;
    }
    std::cout << '\n';
  }
}

ValidationReport full_validation(const AlgebraSpec& spec) {
  ValidationReport r = validate(spec);
  if (spec.kind == AlgebraKind::a_infinity) r.merge(check_delta_m_zero(spec));
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string path;
  bool doubled = false;
};

int cmd_validate(const ValidateArgs& a) {
  AlgebraSpec spec = load(a.path, a.doubled);
  ValidationReport r = full_validation(spec);
  print_report(r);
  if (!r.pass()) return kFail;
  try {
    HomotopyData h = homotopy_for(spec);
    std::cout << "PASS homotopy dim_B=" << h.dim_B() << '\n';
  } catch (const HomotopyError& e) {
    std::cout << "FAIL homotopy";
    if (!e.witness.empty()) std::cout << " witness=" << join(e.witness);
    std::cout << " : " << e.what() << '\n';
    return kFail;
  } catch (const SingularError& e) {
    std::cout << "FAIL homotopy : " << e.what() << '\n';
    return kFail;
  }
  return kPass;
}

struct EnumerateArgs {
  std::optional<int> chi;
  std::optional<int> min_euler;
  int legs = 3;
  bool min3 = false;
  int max_valency = 0;
  bool no_filter = false;
  bool count_only = false;
  bool rooted = false;
};

int cmd_enumerate(const EnumerateArgs& a) {
  if (a.chi && a.min_euler) throw UsageError("--chi and --min-euler are exclusive");
  if (!a.chi && !a.min_euler) throw UsageError("one of --chi or --min-euler is required");
  if (a.legs < 1) throw UsageError("--legs must be at least 1");
  const int hi = a.chi ? *a.chi : 1;
  const int lo = a.chi ? *a.chi : *a.min_euler;
  if (hi > 1) {
    if (a.count_only) std::cout << 0 << '\n';
    return kPass;
  }
  EnumerationOptions eo;
  eo.legs = a.legs;
  eo.mode = a.min3 ? ValencyMode::min3 : ValencyMode::trivalent;
  eo.require_legs_on_every_boundary = !a.no_filter;
  eo.max_valency = a.max_valency;
  if (a.count_only) {
    std::uint64_t total = 0;
    for (int chi = hi; chi >= lo; --chi) {
      eo.chi = chi;
      const std::uint64_t c = a.rooted ? count_rooted_graphs(eo) : count_labeled_graphs(eo);
      total += c;
      if (!a.chi) std::cout << "chi=" << chi << ' ' << c << '\n';
    }
    if (a.chi) std::cout << total << '\n';
    else std::cout << "total " << total << '\n';
    return kPass;
  }
  if (a.rooted) {
    for (int chi = hi; chi >= lo; --chi) {
      eo.chi = chi;
      std::vector<std::string> lines;
      for_each_rooted_graph(eo, [&](const RibbonGraph& g) { lines.push_back(g.encode()); });
      std::cout << "# chi=" << chi << " count=" << lines.size() << '\n';
      for (const auto& l : lines) std::cout << l << '\n';
    }
    return kPass;
  }
  if (a.max_valency != 0) throw UsageError("--max-valency applies to rooted listings and counts only");
  auto groups = enumerate_graphs(lo, a.legs, eo.mode, eo.require_legs_on_every_boundary);
  for (const auto& [chi, graphs] : groups) {
    if (chi > hi) continue;
    std::cout << "# chi=" << chi << " count=" << graphs.size() << '\n';
    for (const auto& cg : graphs) std::cout << cg.graph.encode() << '\n';
  }
  return kPass;
}

struct SolveArgs {
  std::string path;
  bool doubled = false;
  int min_euler = 1;
  int max_legs = 4;
  bool trees_only = false;
  std::string output;
  std::optional<int> jobs;
  std::string weighting = "classes";
  std::string format = "text";
};

int cmd_solve(const SolveArgs& a) {
  if (a.max_legs < 1) throw UsageError("--max-legs must be at least 1");
  if (a.min_euler > 1) throw UsageError("--min-euler must be at most 1");
  AlgebraSpec spec = load(a.path, a.doubled);
  ValidationReport r = full_validation(spec);
  if (!r.pass()) {
    for (const auto& c : r.checks) {
      if (c.pass) continue;
      if (c.name.rfind("delta_m", 0) == 0)
        std::cerr << "refusing to sum graphs: the tadpole condition Delta m_n = 0 fails (" << c.name << ")";
      else
        std::cerr << "refusing to sum graphs: validation check " << c.name << " fails";
      if (!c.witness.empty()) std::cerr << " witness=" << join(c.witness);
      std::cerr << '\n';
    }
    return kFail;
  }
  HomotopyData hom = homotopy_for(spec);
  SumOptions opt;
  opt.chi_min = a.trees_only ? 1 : a.min_euler;
  opt.max_legs = a.max_legs;
  opt.mode = spec.kind == AlgebraKind::associative ? ValencyMode::trivalent : ValencyMode::min3;
  opt.jobs = a.jobs ? *a.jobs : default_jobs();
  if (opt.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (a.weighting == "classes") opt.weighting = Weighting::classes;
  else if (a.weighting == "aut_inverse") opt.weighting = Weighting::aut_inverse;
  else throw UsageError("--weighting must be classes or aut_inverse");
  SumResult res = sum_S(spec, hom, opt);
  Manifest m;
  m.truncation = res.truncation;
  m.chi_min = opt.chi_min;
  m.weighting = to_string(opt.weighting);
  m.algebra = a.path.substr(a.path.find_last_of('/') == std::string::npos ? 0 : a.path.find_last_of('/') + 1) +
              (a.doubled ? " (doubled)" : "");
  std::string text;
  if (a.format == "text") text = format_functional(res.S, m);
  else if (a.format == "json") text = format_functional_json(res.S, m);
  else throw UsageError("--format must be text or json");
  if (a.output.empty() || a.output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(a.output);
    if (!out) throw std::ios_base::failure("cannot write " + a.output);
    out << text;
    std::cerr << "wrote " << res.S.size() << " terms from " << res.graphs << " rooted graphs to " << a.output << '\n';
  }
  return kPass;
}

struct CheckArgs {
  std::string s_path;
  std::string alg_path;
  bool doubled = false;
  std::vector<int> window;
};

int cmd_check(const CheckArgs& a) {
  if (a.window.size() != 2) throw UsageError("--window takes two integers: letters hbar");
  AlgebraSpec spec = load(a.alg_path, a.doubled);
  HomotopyData hom = homotopy_for(spec);
  const BVSpace space = b_space(hom);
  const std::string text = slurp(a.s_path);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  StoredFunctional s = (first != std::string::npos && text[first] == '{')
                           ? parse_functional_json(text, space.parity)
                           : [&] {
                               std::istringstream in(text);
                               return read_functional(in, space.parity);
                             }();
  std::optional<RationalMatrix> op;
  if (!hom.I_B.is_zero()) op = hom.I_B;
  ResidualReport rep;
  try {
    rep = bv_residual(s.functional, s.manifest.truncation, op, space, a.window[0], a.window[1]);
  } catch (const WindowError& e) {
    throw UsageError(e.what());
  }
  std::cout << "window letters<=" << rep.max_letters << " hbar<=" << rep.max_hbar << " S terms=" << s.functional.size()
            << " coefficients examined=" << rep.coefficients_examined << " nonzero=" << rep.nonzero.size() << '\n';
  for (const auto& [k, v] : rep.nonzero) std::cout << "NONZERO " << format_term(k, v) << '\n';
  std::cout << (rep.pass() ? "PASS" : "FAIL") << '\n';
  return rep.pass() ? kPass : kFail;
}

struct DoubleArgs {
  std::string path;
  std::string output;
};

int cmd_double(const DoubleArgs& a) {
  const std::string text = format_algebra(double_algebra(load_algebra(a.path)));
  if (a.output.empty() || a.output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(a.output);
    if (!out) throw std::ios_base::failure("cannot write " + a.output);
    out << text;
  }
  return kPass;
}

int cmd_homotopy(const ValidateArgs& a) {
  AlgebraSpec spec = load(a.path, a.doubled);
  HomotopyData h = homotopy_for(spec);
  const GradedBasis& A = *spec.basis;
  std::cout << "dim_B " << h.dim_B() << '\n';
  std::cout << "B";
  for (int i = 0; i < h.dim_B(); ++i) std::cout << ' ' << h.basis_B->name(i);
  std::cout << '\n';
  for (int j = 0; j < h.H.cols(); ++j)
    for (int i = 0; i < h.H.rows(); ++i)
      if (sgn(h.H(i, j)) != 0) std::cout << "H (" << A.name(j) << ")->" << A.name(i) << '=' << format_rational(h.H(i, j)) << '\n';
  for (int j = 0; j < h.I_B.cols(); ++j)
    for (int i = 0; i < h.I_B.rows(); ++i)
      if (sgn(h.I_B(i, j)) != 0)
        std::cout << "I_B (" << h.basis_B->name(j) << ")->" << h.basis_B->name(i) << '=' << format_rational(h.I_B(i, j)) << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ribbon-graph sums over cyclic algebras and checks of the noncommutative BV equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ribbonbv::kVersion));

  ValidateArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Check the algebra axioms and the homotopy");
  validate_cmd->add_option("algebra", va.path, "Algebra file")->required();
  validate_cmd->add_flag("--double", va.doubled, "Double the algebra first");

  ValidateArgs ha;
  auto* homotopy_cmd = app.add_subcommand("homotopy", "Print the homotopy, B and I restricted to B");
  homotopy_cmd->add_option("algebra", ha.path, "Algebra file")->required();
  homotopy_cmd->add_flag("--double", ha.doubled, "Double the algebra first");

  EnumerateArgs ea;
  auto* enumerate_cmd = app.add_subcommand("enumerate", "List or count connected leg-labeled ribbon graphs");
  enumerate_cmd->add_option("--chi", ea.chi, "Exact Euler characteristic");
  enumerate_cmd->add_option("--min-euler", ea.min_euler, "All Euler characteristics >= this value");
  enumerate_cmd->add_option("--legs", ea.legs, "Number of legs")->required();
  auto* tri = enumerate_cmd->add_flag("--trivalent", "Trivalent vertices (default)");
  enumerate_cmd->add_flag("--min3", ea.min3, "Vertices of valency at least 3")->excludes(tri);
  enumerate_cmd->add_option("--max-valency", ea.max_valency, "Valency cap in --min3 mode");
  enumerate_cmd->add_flag("--no-filter", ea.no_filter, "Keep graphs with legless boundary components");
  enumerate_cmd->add_flag("--count-only", ea.count_only, "Print counts instead of encodings");
  enumerate_cmd->add_flag("--rooted", ea.rooted, "Rooted graphs (leg 1 distinguished) instead of labeled classes");

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Sum ribbon graphs into S");
  solve_cmd->add_option("algebra", sa.path, "Algebra file")->required();
  solve_cmd->add_flag("--double", sa.doubled, "Double the algebra first");
  solve_cmd->add_option("--min-euler", sa.min_euler, "Smallest Euler characteristic summed");
  solve_cmd->add_option("--max-legs", sa.max_legs, "Largest number of legs summed");
  solve_cmd->add_flag("--trees-only", sa.trees_only, "Only trees (Euler characteristic 1)");
  solve_cmd->add_option("-o,--output", sa.output, "Output file (stdout by default)");
  solve_cmd->add_option("--jobs", sa.jobs, "Worker threads (default: RIBBONBV_JOBS or 1)");
  solve_cmd->add_option("--weighting", sa.weighting, "classes or aut_inverse");
  solve_cmd->add_option("--format", sa.format, "text or json");

  CheckArgs ca;
  auto* check_cmd = app.add_subcommand("check", "Evaluate the BV equation on a stored S inside a window");
  check_cmd->add_option("S", ca.s_path, "Functional file (text or json)")->required();
  check_cmd->add_option("algebra", ca.alg_path, "Algebra file")->required();
  check_cmd->add_flag("--double", ca.doubled, "Double the algebra first");
  check_cmd->add_option("--window", ca.window, "Letters and hbar bounds")->expected(2)->required();

  DoubleArgs da;
  auto* double_cmd = app.add_subcommand("double", "Write A + (Pi A)^dual with its odd pairing");
  double_cmd->add_option("algebra", da.path, "Algebra file")->required();
  double_cmd->add_option("-o,--output", da.output, "Output file (stdout by default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(va);
    if (*homotopy_cmd) return cmd_homotopy(ha);
    if (*enumerate_cmd) return cmd_enumerate(ea);
    if (*solve_cmd) return cmd_solve(sa);
    if (*check_cmd) return cmd_check(ca);
    if (*double_cmd) return cmd_double(da);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kUsage;
  } catch (const HomotopyError& e) {
    std::cerr << "homotopy error: " << e.what() << '\n';
    return kFail;
  } catch (const SingularError& e) {
    std::cerr << "singular scalar product: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
