#include "qtrack/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "qtrack/csv.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/lti_system.hpp"

namespace qtrack {

namespace {

using nlohmann::json;

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw Error("matrix fields must be row-major nested arrays");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw Error("ragged matrix rows");
    for (int c = 0; c < cols; ++c) M(i, c) = j[i][c].get<double>();
  }
  return M;
}

Vec vec_from_json(const json& j) {
  Vec v(j.size());
  for (int i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

RefKind kind_from_string(const std::string& s) {
  if (s == "exo_sine") return RefKind::exo_sine;
  if (s == "step") return RefKind::step;
  if (s == "ramp") return RefKind::ramp;
  if (s == "chirp") return RefKind::chirp;
  if (s == "piecewise") return RefKind::piecewise;
  if (s == "tabulated") return RefKind::tabulated;
  throw Error("unknown reference kind: " + s);
}

ReferenceSource ref_from_json(const json& j, int n, int default_coord,
                              double default_noise,
                              const std::filesystem::path& base_dir) {
  ReferenceSource src;
  src.kind = kind_from_string(j.at("kind").get<std::string>());
  src.n = n;
  src.coord = j.value("coord", default_coord);
  src.noise_std = j.value("noise_std", default_noise);
  src.name = j.value("name", j.at("kind").get<std::string>());
  switch (src.kind) {
    case RefKind::exo_sine:
      src.F = mat_from_json(j.at("F"));
      src.r0 = vec_from_json(j.at("r0"));
      if (src.F.rows() != 2 || src.F.cols() != 2 || src.r0.size() != 2) {
        throw DimensionMismatch("exo_sine needs a 2x2 F and a 2-vector r0");
      }
      break;
    case RefKind::step:
      src.value_before = j.value("value_before", 0.0);
      src.value_after = j.at("value_after").get<double>();
      src.k_step = j.at("k_step").get<long>();
      break;
    case RefKind::ramp:
      src.slope = j.at("slope").get<double>();
      src.offset = j.value("offset", 0.0);
      src.start = j.value("start", 0L);
      break;
    case RefKind::chirp:
      src.amplitude = j.at("amplitude").get<double>();
      src.f0 = j.at("f0").get<double>();
      src.f1 = j.at("f1").get<double>();
      src.duration = j.at("duration").get<long>();
      break;
    case RefKind::piecewise:
      for (const auto& piece : j.at("pieces")) {
        src.pieces.emplace_back(piece[0].get<long>(), piece[1].get<double>());
      }
      std::sort(src.pieces.begin(), src.pieces.end());
      break;
    case RefKind::tabulated:
      src.table = read_tabulated_csv(base_dir / j.at("path").get<std::string>(), n);
      break;
  }
  return src;
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw Error("config is not valid JSON: " + std::string(e.what()));
  }

  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", path.stem().string());
    cfg.A = mat_from_json(j.at("plant").at("A"));
    cfg.B = mat_from_json(j.at("plant").at("B"));
    cfg.Q = mat_from_json(j.at("cost").at("Q"));
    cfg.R = mat_from_json(j.at("cost").at("R"));
    cfg.gamma = j.at("cost").at("gamma").get<double>();
    cfg.N = j.value("horizon", 10);

    const json jl = j.value("learner", json::object());
    cfg.learner.gamma = cfg.gamma;
    cfg.learner.N = cfg.N;
    cfg.learner.M_factor = jl.value("M_factor", 1.2);
    cfg.learner.e_w = jl.value("e_w", 1e-6);
    cfg.learner.exploration_variance = jl.value("exploration_variance", 0.1);
    cfg.learner.sigma_ref = jl.value("reference_noise_std", 0.1);
    cfg.learner.seed = jl.value("seed", std::uint64_t{1});
    cfg.learner.max_vi_iters = jl.value("max_vi_iters", 30);
    cfg.learner.steps = jl.value("steps", 0L);
    cfg.learner.noisy_cost = jl.value("noisy_cost", true);
    cfg.learner.require_convergence = jl.value("require_convergence", false);
    if (cfg.learner.M_factor < 1.0) throw Error("M_factor must be >= 1");
    if (cfg.learner.e_w <= 0.0) throw Error("e_w must be positive");

    const int n = static_cast<int>(cfg.A.rows());
    const auto tracked = tracked_coords(cfg.Q);
    const int default_coord = tracked.empty() ? 0 : tracked.front();
    const auto base_dir = path.has_parent_path()
                              ? path.parent_path()
                              : std::filesystem::path(".");

    cfg.training_ref = ref_from_json(j.at("training_reference"), n, default_coord,
                                     cfg.learner.sigma_ref, base_dir);
    // A per-source noise_std on the training reference wins over the
    // learner default; keep the learner's copy (the one run_online uses)
    // in sync with it.
    cfg.learner.sigma_ref = cfg.training_ref.noise_std;

    const json je = j.value("evaluation", json::object());
    cfg.eval_steps = je.value("steps", 300L);
    for (const auto& jr : je.value("references", json::array())) {
      cfg.eval_refs.push_back(ref_from_json(jr, n, default_coord, 0.0, base_dir));
    }

    if (j.contains("baseline_exo")) {
      cfg.exo_F = mat_from_json(j.at("baseline_exo").at("F"));
      cfg.exo_r0 = vec_from_json(j.at("baseline_exo").at("r0"));
    } else if (cfg.training_ref.kind == RefKind::exo_sine) {
      cfg.exo_F = cfg.training_ref.F;
      cfg.exo_r0 = cfg.training_ref.r0;
    }
  } catch (const json::exception& e) {
    throw Error("config field error: " + std::string(e.what()));
  }
  return cfg;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open config: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (f.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace qtrack
