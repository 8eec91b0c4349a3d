#pragma once

// Subcommand implementations for the tl1pca command-line tool.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tl1pca/tl1pca.hpp"

namespace tl1pca::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Process exit code for a failure category.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::data:
    case ErrorKind::shape: return 3;
    case ErrorKind::contract:
    case ErrorKind::numeric: return 4;
  }
  return 4;
}

struct SolverFlags {
  std::uint64_t seed = 0;
  double theta0 = std::numbers::pi / 4;
  double rel_tol = 1e-8;
  int max_iter = 500;

  SolverConfig config() const {
    SolverConfig c;
    c.seed = seed;
    c.theta0 = theta0;
    c.rel_tol = rel_tol;
    c.max_iter = max_iter;
    c.validate();
    return c;
  }
};

struct FitArgs {
  std::string method;
  double a = 1.0;
  double p = 0.5;
  int m = 1;
  std::string input;
  std::string out_dir;
  SolverFlags solver;
};

struct ToyArgs {
  std::vector<std::string> methods{"l2", "l1", "lp", "tl1"};
  std::vector<double> a{100, 1, 0.01};
  std::vector<double> p{1, 0.5, 0.01};
  std::string out_dir;
  SolverFlags solver{.seed = 7};
};

struct EvalArgs {
  std::string input;
  std::vector<std::string> methods{"tl1", "lp", "l1", "l2"};
  std::vector<double> a{std::begin(kShapeGrid), std::end(kShapeGrid)};
  std::vector<double> p{std::begin(kExponentGrid), std::end(kExponentGrid)};
  std::string dims = "1..10";
  int block = 0;
  std::string fill = "random";
  int repeats = 15;
  std::optional<double> train_fraction;
  std::optional<int> train_per_class;
  bool refit_per_dim = false;
  std::string out_dir;
  SolverFlags solver;
};

struct ConvergenceArgs {
  std::string input;  // empty: use the toy dataset
  std::string method = "tl1";
  double a = 1.0;
  double p = 0.5;
  std::string out_dir;
  SolverFlags solver{.seed = 7};
};

struct SynthArgs {
  int classes = 10;
  int per_class = 10;
  int dim = 30;
  double noise_fraction = 0.2;
  std::uint64_t seed = 0;
  std::string output;
};

// ---------------------------------------------------------------------------
// helpers

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// FNV-1a 64-bit, hex.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline LabeledDataset load_input(const std::string& path, json& manifest) {
  const std::string bytes = read_file(path);
  manifest["input"] = {{"path", path}, {"fnv1a64", fnv1a_hex(bytes)}};
  std::istringstream in(bytes);
  return read_csv(in);
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::data, "cannot write " + tmp.string());
    out << contents;
    if (!out) fail(ErrorKind::data, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline fs::path prepare_out_dir(const std::string& dir) {
  if (dir.empty()) fail(ErrorKind::config, "--out-dir is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::data, "cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

inline json solver_json(const SolverConfig& c) {
  return {{"theta0", c.theta0},       {"theta_min", c.theta_min},         {"rel_tol", c.rel_tol},
          {"max_iter", c.max_iter},   {"perturb_scale", c.perturb_scale}, {"zero_margin", c.zero_margin},
          {"seed", c.seed},           {"max_halvings", c.max_halvings}};
}

inline MethodConfig make_method(const std::string& name, double a, double p, const SolverConfig& cfg) {
  MethodConfig mc;
  mc.method = parse_method(name);
  mc.solver = cfg;
  if (mc.method == Method::tl1) mc.param = ShapeParamA(a).value();
  if (mc.method == Method::lp) mc.param = PNormExponent(p).value();
  return mc;
}

/// Accepts "a..b", "a..b:step" and comma-separated combinations, e.g. "1..5,10,20..60:10".
inline std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  auto to_int = [&](const std::string& s) {
    int v = 0;
    if (!detail::parse_number(s, v)) fail(ErrorKind::config, "bad --dims entry '" + s + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const std::string rest = item.substr(dots + 2);
    const auto colon = rest.find(':');
    const int lo = to_int(item.substr(0, dots));
    const int hi = to_int(rest.substr(0, colon));
    const int step = colon == std::string::npos ? 1 : to_int(rest.substr(colon + 1));
    if (step < 1 || hi < lo) fail(ErrorKind::config, "bad --dims range '" + item + "'");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  }
  if (out.empty()) fail(ErrorKind::config, "--dims is empty");
  return out;
}

inline unsigned thread_cap() {
  if (const char* env = std::getenv("TL1PCA_THREADS")) {
    int v = 0;
    if (!detail::parse_number(std::string_view(env), v) || v < 1) {
      fail(ErrorKind::config, "TL1PCA_THREADS must be a positive integer");
    }
    return static_cast<unsigned>(v);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// commands

inline void cmd_fit(const FitArgs& args) {
  const SolverConfig cfg = args.solver.config();
  const MethodConfig mc = make_method(args.method, args.a, args.p, cfg);
  if (args.m < 1) fail(ErrorKind::config, "--m must be >= 1");

  json manifest;
  manifest["command"] = "fit";
  manifest["version"] = kVersion;
  const LabeledDataset ds = load_input(args.input, manifest);
  const fs::path out = prepare_out_dir(args.out_dir);
  if (args.m > ds.data.dim()) fail(ErrorKind::config, "--m exceeds the data dimension");

  const DataMatrix x = center(ds.data);
  const FitResult res = fit_method(x, args.m, mc);

  std::ostringstream w_csv;
  write_projection_csv(w_csv, res.w);
  write_atomic(out / "W.csv", w_csv.str());

  json objectives = json::array();
  for (std::size_t j = 0; j < res.traces.size(); ++j) {
    std::ostringstream t_csv;
    write_trace_csv(t_csv, res.traces[j]);
    write_atomic(out / ("trace_" + std::to_string(j + 1) + ".csv"), t_csv.str());
    objectives.push_back(res.traces[j].objectives.back());
  }
  if (mc.method == Method::l2) {
    const Matrix proj = project(x, res.w);
    for (Eigen::Index j = 0; j < proj.rows(); ++j) objectives.push_back(proj.row(j).squaredNorm());
  }

  manifest["method"] = to_string(mc.method);
  manifest["param"] = mc.method == Method::tl1 || mc.method == Method::lp ? json(mc.param) : json(nullptr);
  manifest["m"] = args.m;
  manifest["columns"] = res.w.count();
  manifest["truncated"] = res.truncated;
  manifest["solver"] = solver_json(cfg);
  manifest["centering_means"] = std::vector<double>(x.feature_means().begin(), x.feature_means().end());
  manifest["objectives"] = objectives;
  write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
}

inline void cmd_toy(const ToyArgs& args) {
  const SolverConfig cfg = args.solver.config();
  std::vector<MethodConfig> runs;
  for (const auto& name : args.methods) {
    const Method m = parse_method(name);
    if (m == Method::tl1) {
      for (double a : args.a) runs.push_back(make_method(name, a, 0.5, cfg));
    } else if (m == Method::lp) {
      for (double p : args.p) runs.push_back(make_method(name, 1.0, p, cfg));
    } else {
      runs.push_back(make_method(name, 1.0, 0.5, cfg));
    }
  }
  const fs::path out = prepare_out_dir(args.out_dir);
  const LabeledDataset ds = toy_generate(cfg.seed);
  write_atomic(out / "toy.csv", to_csv_string(ds));

  Vector ref(2);
  ref << std::sqrt(0.5), std::sqrt(0.5);
  std::ostringstream table;
  table << "method,param,angle_deg\n";
  json rows = json::array();
  for (const auto& mc : runs) {
    // The inliers are already zero-sum; the outliers are deliberately left uncentered.
    const FitResult res = fit_method(ds.data, 1, mc);
    const double angle = angle_to(res.w.column(0), ref);
    const bool has_param = mc.method == Method::tl1 || mc.method == Method::lp;
    table << to_string(mc.method) << ',' << (has_param ? format_double(mc.param) : "") << ','
          << format_double(angle) << '\n';
    rows.push_back({{"method", to_string(mc.method)},
                    {"param", has_param ? json(mc.param) : json(nullptr)},
                    {"angle_deg", angle},
                    {"w", std::vector<double>{res.w.columns()(0, 0), res.w.columns()(1, 0)}}});
  }
  write_atomic(out / "angles.csv", table.str());

  json manifest;
  manifest["command"] = "toy";
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.seed;
  manifest["solver"] = solver_json(cfg);
  manifest["reference_direction_deg"] = 45;
  manifest["results"] = rows;
  write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
}

inline void cmd_eval(const EvalArgs& args) {
  const SolverConfig cfg = args.solver.config();
  const BlockFill fill = parse_fill(args.fill);
  if (args.block < 0) fail(ErrorKind::config, "--block must be >= 0");
  if (args.repeats < 1) fail(ErrorKind::config, "--repeats must be >= 1");
  std::vector<int> dims = parse_dims(args.dims);

  SplitSpec split;
  split.n_repeats = args.repeats;
  split.seed = cfg.seed;
  if (args.train_fraction && args.train_per_class) {
    fail(ErrorKind::config, "use only one of --train-fraction and --train-per-class");
  }
  if (args.train_per_class) {
    split.train_per_class = args.train_per_class;
  } else {
    split.train_fraction = args.train_fraction.value_or(0.7);
  }
  split.validate();

  std::vector<MethodConfig> runs;
  for (const auto& name : args.methods) {
    const Method m = parse_method(name);
    if (m == Method::tl1) {
      for (double a : args.a) runs.push_back(make_method(name, a, 0.5, cfg));
    } else if (m == Method::lp) {
      for (double p : args.p) runs.push_back(make_method(name, 1.0, p, cfg));
    } else {
      runs.push_back(make_method(name, 1.0, 0.5, cfg));
    }
  }

  json manifest;
  manifest["command"] = "eval";
  manifest["version"] = kVersion;
  const LabeledDataset ds = load_input(args.input, manifest);
  if (args.block > 0) {
    if (!ds.image_shape) fail(ErrorKind::config, "--block needs an #image_shape line in the input");
    if (args.block > std::min(ds.image_shape->height, ds.image_shape->width)) {
      fail(ErrorKind::config, "--block " + std::to_string(args.block) + " exceeds the " +
                                  std::to_string(ds.image_shape->height) + "x" +
                                  std::to_string(ds.image_shape->width) + " image size");
    }
  }
  const fs::path out = prepare_out_dir(args.out_dir);

  const NoiseOptions noise{args.block, fill};
  const CurveOptions opts{args.refit_per_dim, thread_cap()};
  std::vector<EvalReport> reports;
  for (const auto& mc : runs) reports.push_back(accuracy_curve(ds, mc, dims, split, noise, opts));

  json all = json::array();
  for (const auto& r : reports) all.push_back(report_to_json(r));
  write_atomic(out / "report.json", all.dump(2) + "\n");
  std::ostringstream csv;
  write_reports_csv(csv, reports);
  write_atomic(out / "report.csv", csv.str());

  manifest["seed"] = cfg.seed;
  manifest["solver"] = solver_json(cfg);
  manifest["dims"] = dims;
  manifest["block"] = args.block;
  manifest["fill"] = to_string(fill);
  manifest["repeats"] = args.repeats;
  manifest["train_fraction"] = split.train_fraction ? json(*split.train_fraction) : json(nullptr);
  manifest["train_per_class"] = split.train_per_class ? json(*split.train_per_class) : json(nullptr);
  manifest["refit_per_dim"] = args.refit_per_dim;
  write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
}

inline void cmd_convergence(const ConvergenceArgs& args) {
  const SolverConfig cfg = args.solver.config();
  const MethodConfig mc = make_method(args.method, args.a, args.p, cfg);
  if (mc.method == Method::l2) fail(ErrorKind::config, "l2 has no iterative trace");

  json manifest;
  manifest["command"] = "convergence";
  manifest["version"] = kVersion;
  DataMatrix x = args.input.empty() ? toy_generate(cfg.seed).data
                                    : center(load_input(args.input, manifest).data);
  if (args.input.empty()) manifest["input"] = {{"toy_seed", cfg.seed}};
  const fs::path out = prepare_out_dir(args.out_dir);

  const FitResult res = fit_method(x, 1, mc);
  std::ostringstream csv;
  write_trace_csv(csv, res.traces.front());
  write_atomic(out / "trace.csv", csv.str());

  manifest["method"] = to_string(mc.method);
  manifest["param"] = mc.method == Method::l1 ? json(nullptr) : json(mc.param);
  manifest["solver"] = solver_json(cfg);
  manifest["trace"] = trace_to_json(res.traces.front());
  write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
}

inline void cmd_synth(const SynthArgs& args) {
  if (args.output.empty()) fail(ErrorKind::config, "--output is required");
  SyntheticSpec spec;
  spec.n_classes = args.classes;
  spec.per_class = args.per_class;
  spec.dim = args.dim;
  spec.noise_fraction = args.noise_fraction;
  const fs::path path(args.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_atomic(path, to_csv_string(synthetic_classes(spec, args.seed)));
}

}  // namespace tl1pca::cli
