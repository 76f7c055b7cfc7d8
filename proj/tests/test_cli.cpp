#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "killingflow/cli.hpp"
#include "killingflow/config.hpp"
#include "killingflow/expr.hpp"

using namespace kflow;

#ifndef KF_SOURCE_DIR
#define KF_SOURCE_DIR "."
#endif

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Random well-formed expression text with random spacing and redundant parentheses.
class ExprGenerator {
 public:
  explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string make(int depth) {
    std::string s = node(depth);
    return s;
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string space() { return pick(3) == 0 ? " " : ""; }

  std::string number() {
    switch (pick(4)) {
      case 0: return std::to_string(pick(10));
      case 1: return std::to_string(pick(100)) + "." + std::to_string(pick(1000));
      case 2: return std::to_string(1 + pick(9)) + "e" + (pick(2) ? "-" : "") + std::to_string(pick(4));
      default: return "." + std::to_string(1 + pick(99));
    }
  }

  std::string leaf() {
    switch (pick(5)) {
      case 0: return "r";
      case 1: return "theta";
      case 2: return "t";
      case 3: return "pi";
      default: return number();
    }
  }

  std::string node(int depth) {
    if (depth == 0) return leaf();
    const int kind = pick(10);
    if (kind < 5) {
      static const char* ops[] = {"+", "-", "*", "/", "^"};
      const char* op = ops[pick(5)];
      return wrap(node(depth - 1)) + space() + op + space() + wrap(node(depth - 1));
    }
    if (kind < 6) return "-" + wrap(node(depth - 1));
    if (kind < 9) {
      static const char* one[] = {"sin", "cos", "tan", "sinh", "cosh", "tanh",
                                  "exp", "log", "sqrt", "abs"};
      return std::string(one[pick(10)]) + "(" + space() + node(depth - 1) + space() + ")";
    }
    return std::string(pick(2) ? "min" : "max") + "(" + node(depth - 1) + "," + space() +
           node(depth - 1) + ")";
  }

  // Parenthesize compound operands so the generated text means what was built.
  std::string wrap(const std::string& s) {
    const bool simple = s.find_first_of("+-*/^ ") == std::string::npos;
    if (simple && pick(4) != 0) return s;
    return "(" + s + ")";
  }

  std::mt19937_64 rng_;
};

struct Outcome {
  bool threw = false;
  double value = 0.0;
};

Outcome evaluate(const Expr& e, const Variables& v) {
  try {
    return {false, e.eval(v)};
  } catch (const DomainError&) {
    return {true, 0.0};
  }
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("expression examples") {
  CHECK(parse_expression("0.5*cos(2*theta)")(0.0, 0.0) == 0.5);
  CHECK(parse_expression("cosh(r)")(1.0, 0.0) == doctest::Approx(1.5431).epsilon(1e-4));
  CHECK(parse_expression("cosh(r)")(1.0, 0.0) == std::cosh(1.0));

  try {
    parse_expression("cos(theta");
    FAIL("expected a syntax error");
  } catch (const ExprSyntaxError& e) {
    CHECK(e.offset == 9);
    CHECK(e.expected == std::vector<std::string>{")"});
  }
  try {
    parse_expression("r + zeta");
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifierError& e) {
    CHECK(e.offset == 4);
    CHECK(e.name == "zeta");
  }
  CHECK_THROWS_AS(parse_expression(""), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("1 +"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("(1"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("1 2"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("min(1)"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("sin 1"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("1e999"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("r $ 2"), ExprSyntaxError);
  CHECK_THROWS_AS(parse_expression("foo(1)"), UnknownIdentifierError);
}

TEST_CASE("precedence and associativity") {
  auto v = [](const char* s) { return parse_expression(s)(0.0, 0.0); };
  CHECK(v("2*3+4") == 10.0);
  CHECK(v("2+3*4") == 14.0);
  CHECK(v("8/4/2") == 1.0);
  CHECK(v("2-3-4") == -5.0);
  CHECK(v("2^3^2") == 512.0);
  CHECK(v("-2^2") == -4.0);
  CHECK(v("(-2)^2") == 4.0);
  CHECK(v("2^-1") == 0.5);
  CHECK(v("--3") == 3.0);
  CHECK(v("(1+2)*3") == 9.0);
  CHECK(v("min(1, max(2, 3))") == 1.0);
  CHECK(v("abs(-2.5e1)") == 25.0);
  CHECK(v(" 1.5e+1 ") == 15.0);
  CHECK(v("pi") == std::numbers::pi);
  const Expr e = parse_expression("r*theta - t");
  CHECK(e(2.0, 3.0, 1.0) == 5.0);
  CHECK(e.uses_r());
  CHECK(e.uses_theta());
  CHECK(e.uses_t());
  CHECK(!parse_expression("cos(theta)").uses_r());
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(parse_expression("log(r)")(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(parse_expression("log(-1)")(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(parse_expression("sqrt(r - 1)")(0.5, 0.0), DomainError);
  CHECK(parse_expression("sqrt(r)")(0.0, 0.0) == 0.0);
  CHECK(std::isinf(parse_expression("1/r")(0.0, 0.0)));
}

TEST_CASE("printing: known forms") {
  auto p = [](const char* s) { return parse_expression(s).to_string(); };
  CHECK(p("1+2*3") == "1 + 2*3");
  CHECK(p("(1+2)*3") == "(1 + 2)*3");
  CHECK(p("1-(2-3)") == "1 - (2 - 3)");
  CHECK(p("(1-2)-3") == "1 - 2 - 3");
  CHECK(p("2^(3^2)") == "2^3^2");
  CHECK(p("(2^3)^2") == "(2^3)^2");
  CHECK(p("-(2^2)") == "-2^2");
  CHECK(p("(-2)^2") == "(-2)^2");
  CHECK(p("-(r+1)") == "-(r + 1)");
  CHECK(p("max(r,0.1)") == "max(r, 0.1)");
  CHECK(p("3.14159265358979311600") == "pi");
}

TEST_CASE("1000 random expressions round-trip through print and parse") {
  ExprGenerator gen(20240601);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rr(0.0, 3.0), th(-4.0, 4.0), tt(0.0, 2.0);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string src = gen.make(1 + i % 5);
    CAPTURE(src);
    const Expr a = parse_expression(src);
    const std::string printed = a.to_string();
    CAPTURE(printed);
    const Expr b = parse_expression(printed);
    CHECK(b.to_string() == printed);  // print is a fixed point after one pass
    for (int k = 0; k < 10; ++k) {
      const Variables v{rr(rng), th(rng), tt(rng)};
      const Outcome x = evaluate(a, v), y = evaluate(b, v);
      REQUIRE(x.threw == y.threw);
      if (!x.threw) CHECK(same_bits(x.value, y.value));
      ++checked;
    }
  }
  CHECK(checked == 10000);
}

TEST_CASE("config: minimal file gets the documented defaults") {
  const RunConfig c = parse_config("[model]\nname = \"euclidean\"\nn = 2\n");
  CHECK(c.model.name == "euclidean");
  CHECK(c.model.quad_tol == 1e-10);
  CHECK(c.control.cfl == 0.5);
  CHECK(c == RunConfig{});
  // top-level shorthand
  CHECK(parse_config("model = \"hyperbolic\"\nn = 3\n").model.n == 3);
  const RunConfig demo = load_config(std::string(KF_SOURCE_DIR) + "/configs/demo.toml");
  CHECK(demo.model.name == "hyperbolic");
  CHECK(demo.problem.phi == "0.5*cos(theta)");
}

TEST_CASE("config: schema errors name key and constraint") {
  auto fails = [](const std::string& text, const std::string& key) {
    try {
      parse_config(text);
    } catch (const SchemaError& e) {
      CHECK(e.key == key);
      return e.constraint;
    }
    FAIL("expected a schema error for " << key);
    return std::string();
  };
  const std::string head = "[model]\nname = \"euclidean\"\n";
  CHECK(fails(head + "[grid]\nntheta = 3\n", "grid.ntheta") == "ntheta >= 8 or = 1");
  fails(head + "[grid]\nnr = 2\n", "grid.nr");
  fails(head + "[grid]\nR = -1\n", "grid.R");
  fails(head + "[grid]\nR = abc\n", "grid.R");
  fails(head + "[grid]\nnr = 1.5\n", "grid.nr");
  fails(head + "[control]\ncfl = 1.5\n", "control.cfl");
  fails(head + "[control]\nscheme = \"rk4\"\n", "control.scheme");
  fails(head + "[problem]\nphi = \"cos(theta\"\n", "problem.phi");
  fails(head + "[problem]\nphi = \"r\"\n", "problem.phi");
  fails(head + "[problem]\nu0 = \"t\"\n", "problem.u0");
  fails(head + "[grid]\nsize = 3\n", "grid.size");
  fails(head + "[mesh]\nnr = 3\n", "mesh.nr");
  fails(head + "n = 9\n", "model.n");
  fails("[model]\nname = \"sphere\"\n", "model.name");
  fails("[model]\nname = \"custom\"\nwarp = \"table\"\n", "model.warp_table");
  fails(head + "[verify]\nchecks = [\"nope\"]\n", "verify.checks");
  fails(head + "[exhaust]\nrungs = 1\n", "exhaust.rungs");
  fails(head + "[exhaust]\nstop_early = maybe\n", "exhaust.stop_early");
  fails("[grid]\nnr = 32\n", "model");
  fails(head + "[grid]\nnr = 32\nnr = 33\n", "grid.nr");
  CHECK_THROWS_AS(load_config("/nonexistent/path.toml"), ConfigError);
}

TEST_CASE("config: load, serialize, load gives an equal config") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    RunConfig c;
    c.model.name = i % 2 ? "hyperbolic" : "euclidean";
    c.model.n = 2 + i % 3;
    c.model.quad_tol = 1e-12 + 1e-6 * u(rng);
    c.grid.nr = 4 + i;
    c.grid.ntheta = i % 3 ? 8 + i : 1;
    c.grid.R = 0.1 + 10 * u(rng);
    c.control.scheme = i % 2 ? "explicit_euler" : "semi_implicit";
    c.control.cfl = 0.01 + 0.98 * u(rng);
    c.control.dt_max = 1e-5 + u(rng);
    c.problem.phi = "0.5*cos(" + std::to_string(i) + "*theta)";
    c.problem.u0 = i % 2 ? "" : "r*cos(theta)";
    c.problem.T = u(rng);
    c.exhaust.tol = u(rng) + 1e-9;
    c.exhaust.stop_early = i % 2 == 0;
    c.verify.checks = i % 2 ? std::vector<std::string>{"all"}
                            : std::vector<std::string>{"cmc", "operator"};
    const std::string text = serialize_config(c);
    CAPTURE(text);
    const RunConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
}

TEST_CASE("CSV quoting follows RFC 4180") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv_row({"1", "x,y", ""}) == "1,\"x,y\",\r\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("cmc subcommand: hemisphere value at r = 0.6") {
  const Run direct = run({"cmc", "--model", "euclidean", "--n", "2", "--R", "1", "--at", "0.6"});
  REQUIRE(direct.code == 0);
  const auto rows = parse_csv(direct.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"r", "v", "v_prime"});
  CHECK(std::abs(std::stod(rows[1][1]) - 0.8) <= 1e-7);

  // the grid CSV, read back with cubic Hermite interpolation on the bracketing cell
  const Run grid = run({"cmc", "--model", "euclidean", "--n", "2", "--R", "1", "--grid", "256"});
  REQUIRE(grid.code == 0);
  const auto table = parse_csv(grid.out);
  REQUIRE(table.size() == 258);
  double value = NAN;
  for (std::size_t i = 1; i + 1 < table.size(); ++i) {
    const double r0 = std::stod(table[i][0]), r1 = std::stod(table[i + 1][0]);
    if (r0 <= 0.6 && 0.6 <= r1) {
      const double h = r1 - r0, s = (0.6 - r0) / h;
      const double v0 = std::stod(table[i][1]), v1 = std::stod(table[i + 1][1]);
      const double d0 = std::stod(table[i][2]), d1 = std::stod(table[i + 1][2]);
      value = (2 * s * s * s - 3 * s * s + 1) * v0 + (s * s * s - 2 * s * s + s) * h * d0 +
              (-2 * s * s * s + 3 * s * s) * v1 + (s * s * s - s * s) * h * d1;
      break;
    }
  }
  CHECK(std::abs(value - 0.8) <= 1e-7);
}

TEST_CASE("dispatch exit codes") {
  const Run unknown = run({"frobnicate"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"cmc", "--help"}).code == 0);
  CHECK(run({"cmc", "--grid", "3"}).code == 2);
  CHECK(run({"cmc", "--R", "inf"}).code == 2);
  CHECK(run({"cmc", "--R", "1", "--at", "2"}).code == 2);
  CHECK(run({"flow", "--phi", "cos(theta", "--dry-run"}).code == 2);
  CHECK(run({"flow", "--config", "/nonexistent.toml"}).code == 2);
  CHECK(run({"barrier", "--model", "hyperbolic_base", "--sc"}).code == 1);
  CHECK(run({"barrier", "--model", "hyperbolic", "--t", "1e300"}).code == 1);

  const std::string demo = std::string(KF_SOURCE_DIR) + "/configs/demo.toml";
  const Run verify = run({"verify", "--all", "--config", demo});
  CHECK(verify.code == 0);
  const Json report = Json::parse(verify.out);
  CHECK(report["passed"] == true);
  CHECK(report["checks"].size() == 6);

  // a failing check yields exit 1
  const Run strict = run({"verify", "--check", "curvature", "--config", demo, "--dry-run"});
  CHECK(strict.code == 0);
  std::filesystem::path tight = std::filesystem::temp_directory_path() / "kf_tight.toml";
  {
    std::ofstream f(tight);
    f << "[model]\nname = \"euclidean\"\n[verify]\ncurvature_tol = 1e-12\n";
  }
  CHECK(run({"verify", "--check", "curvature", "--config", tight.string()}).code == 1);
  std::filesystem::remove(tight);
}

TEST_CASE("dry run prints a config that loads back to the same values") {
  const Run r = run({"flow", "--model", "hyperbolic", "--R", "2.5", "--nr", "40", "--phi",
                     "0.25*sin(theta)", "--dry-run"});
  REQUIRE(r.code == 0);
  const RunConfig c = parse_config(r.out);
  CHECK(c.model.name == "hyperbolic");
  CHECK(c.grid.R == 2.5);
  CHECK(c.grid.nr == 40);
  CHECK(c.problem.phi == "0.25*sin(theta)");
}

TEST_CASE("fuzzed argv corpus only produces exit codes 0, 1, 2") {
  const std::vector<std::string> commands{"model-info", "cmc", "barrier", "flow", "exhaust",
                                          "verify", "cmcx", "", "-", "--"};
  const std::vector<std::string> options{"--model", "--n", "--R", "--grid", "--at", "--json",
                                         "--r0", "--t", "--points", "--sc", "--samples", "--l0",
                                         "--nr", "--ntheta", "--phi", "--u0", "--rungs", "--tol",
                                         "--check", "--all", "--seed", "--quad-tol", "--bogus",
                                         "-x", "--config"};
  const std::vector<std::string> values{"-1", "0", "0.5", "1", "2", "3", "64", "nan", "inf",
                                        "1e309", "abc", "", "euclidean", "hyperbolic",
                                        "hyperbolic_base", "cos(theta", "r*", "0.5*cos(theta)",
                                        "cmc", "all", "/nonexistent", "17", "--"};
  std::mt19937_64 rng(99);
  auto pick = [&](const std::vector<std::string>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  };
  int codes[3] = {0, 0, 0};
  for (int i = 0; i < 400; ++i) {
    std::vector<std::string> args{pick(commands)};
    const int count = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int k = 0; k < count; ++k) {
      args.push_back(pick(options));
      if (rng() % 4 != 0) args.push_back(pick(values));
    }
    // the solver subcommands stop after validation so the corpus stays fast
    if (args[0] == "flow" || args[0] == "exhaust" || args[0] == "verify") args.push_back("--dry-run");
    std::ostringstream out, err;
    int code = -1;
    CHECK_NOTHROW(code = dispatch(args, out, err));
    CAPTURE(args.size());
    REQUIRE((code == 0 || code == 1 || code == 2));
    ++codes[code];
  }
  CHECK(codes[2] > 0);
  CHECK(codes[0] > 0);
}

TEST_CASE("thread cap from the environment") {
  setenv("KILLINGFLOW_THREADS", "1", 1);
  CHECK(apply_thread_cap() == 1);
  setenv("KILLINGFLOW_THREADS", "garbage", 1);
  CHECK(apply_thread_cap() >= 1);
  unsetenv("KILLINGFLOW_THREADS");
  apply_thread_cap();
}

TEST_CASE("SVG output") {
  const ModelGeometry eu{euclidean_model(2)};
  const Grid g = make_grid(eu, 1.0, 8, 16);
  Field u(g.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::sin(0.1 * k);
  const std::string heat = svg_heatmap(g, u, "u <test> & more");
  CHECK(heat.rfind("<svg", 0) == 0);
  CHECK(heat.find("&lt;test&gt; &amp;") != std::string::npos);
  std::size_t polygons = 0;
  for (std::size_t p = heat.find("<polygon"); p != std::string::npos; p = heat.find("<polygon", p + 1)) ++polygons;
  CHECK(polygons == 9 * 64);
  const std::string curves = svg_curves({{"a", {0, 1, 2}, {0, 1, 4}}, {"b", {0, 2}, {1, NAN}}}, "t", "x", "y");
  CHECK(curves.find("<polyline") != std::string::npos);
  CHECK(curves.find("</svg>") != std::string::npos);
}
