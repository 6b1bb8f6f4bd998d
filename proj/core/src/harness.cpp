#include "semiwell/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "semiwell/projection.hpp"
#include "semiwell/resolvent.hpp"
#include "semiwell/roe.hpp"
#include "semiwell/spectral.hpp"

namespace semiwell {

namespace {

using nlohmann::json;

double get_num(const json& j, const char* key, double fallback,
               bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError("config", std::string("missing ") + key);
    return fallback;
  }
  if (!j[key].is_number())
    throw ConfigError("config", std::string(key) + " must be a number");
  return j[key].get<double>();
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          size_t min_cols) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open CSV " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw ConfigError("config", "bad CSV cell in " + path);
      }
    }
    if (row.size() < min_cols)
      throw ConfigError("config", "short CSV row in " + path);
    rows.push_back(std::move(row));
  }
  return rows;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)v);
  return buf;
}

}  // namespace

ModelSpec parse_model_spec(const json& j) {
  ModelSpec s;
  s.dim = (int)get_num(j, "dim", 1, true);
  if (!j.contains("shape") || !j["shape"].is_array())
    throw ConfigError("config", "shape must be an array");
  for (const auto& v : j["shape"]) s.shape.push_back(v.get<int>());
  s.spacing = get_num(j, "spacing", 1.0, true);
  s.boundary = j.value("boundary", std::string("dirichlet_box"));
  if (s.boundary != "dirichlet_box" && s.boundary != "periodic_torus")
    throw ConfigError("config", "unknown boundary " + s.boundary);

  if (!j.contains("potential"))
    throw ConfigError("config", "missing potential");
  const json& p = j["potential"];
  s.potential.kind = p.value("kind", std::string("cosine_wells"));
  s.potential.amplitude = get_num(p, "amplitude", 1.0);
  s.potential.period = get_num(p, "period", 1.0);
  s.potential.width = get_num(p, "width", 1.0);
  if (p.contains("centers"))
    for (const auto& c : p["centers"])
      s.potential.centers.push_back(c.get<std::vector<double>>());
  s.potential.table_path = p.value("table", std::string());
  if (s.potential.kind != "cosine_wells" &&
      s.potential.kind != "gaussian_wells" && s.potential.kind != "table")
    throw ConfigError("config", "unknown potential kind " + s.potential.kind);

  const json f = j.value("field", json{{"kind", "zero"}});
  s.field.kind = f.value("kind", std::string("zero"));
  s.field.b = get_num(f, "b", 0.0);
  s.field.table_path = f.value("table", std::string());
  if (s.field.kind != "zero" && s.field.kind != "uniform_b" &&
      s.field.kind != "table")
    throw ConfigError("config", "unknown field kind " + s.field.kind);
  return s;
}

json model_spec_to_json(const ModelSpec& s) {
  json p{{"kind", s.potential.kind},
         {"amplitude", s.potential.amplitude},
         {"period", s.potential.period},
         {"width", s.potential.width},
         {"centers", s.potential.centers},
         {"table", s.potential.table_path}};
  json f{{"kind", s.field.kind},
         {"b", s.field.b},
         {"table", s.field.table_path}};
  return json{{"dim", s.dim},        {"shape", s.shape},
              {"spacing", s.spacing}, {"boundary", s.boundary},
              {"potential", p},       {"field", f}};
}

GridModel build_model(const ModelSpec& s) {
  PotentialFn V;
  const PotentialSpec& p = s.potential;
  if (p.kind == "cosine_wells") {
    V = [p](const std::array<double, 2>& x) {
      double v = 1.0;
      double s0 = std::sin(std::numbers::pi * x[0] / p.period);
      v *= s0 * s0;
      return p.amplitude * v;
    };
    if (s.dim == 2) {
      V = [p](const std::array<double, 2>& x) {
        double s0 = std::sin(std::numbers::pi * x[0] / p.period);
        double s1 = std::sin(std::numbers::pi * x[1] / p.period);
        return p.amplitude * (s0 * s0 + s1 * s1) / 2.0;
      };
    }
  } else if (p.kind == "gaussian_wells") {
    V = [p, dim = s.dim](const std::array<double, 2>& x) {
      double dip = 0;
      for (const auto& c : p.centers) {
        double d2 = 0;
        for (int ax = 0; ax < dim; ++ax) {
          double d = x[ax] - c[ax];
          d2 += d * d;
        }
        dip += std::exp(-d2 / (2 * p.width * p.width));
      }
      return std::max(0.0, p.amplitude * (1.0 - dip));
    };
  } else {  // table
    auto rows = read_csv(p.table_path, (size_t)s.dim + 1);
    int n = 1;
    for (int e : s.shape) n *= e;
    auto table = std::make_shared<std::vector<double>>(n, -1.0);
    for (const auto& r : rows) {
      int x0 = (int)r[0];
      int x1 = s.dim == 2 ? (int)r[1] : 0;
      if (x0 < 0 || x0 >= s.shape[0] ||
          (s.dim == 2 && (x1 < 0 || x1 >= s.shape[1])))
        throw ConfigError("config", "table site out of range");
      (*table)[x0 + (s.dim == 2 ? s.shape[0] * x1 : 0)] = r[s.dim];
    }
    for (double v : *table)
      if (v < 0)
        throw ConfigError("config", "potential table does not cover the grid");
    double a = s.spacing;
    auto shape0 = s.shape[0];
    int dim = s.dim;
    V = [table, a, shape0, dim](const std::array<double, 2>& x) {
      int x0 = (int)std::lround(x[0] / a);
      int x1 = dim == 2 ? (int)std::lround(x[1] / a) : 0;
      return (*table)[x0 + (dim == 2 ? shape0 * x1 : 0)];
    };
  }

  VectorPotentialFn A;
  if (s.field.kind == "uniform_b" && s.dim == 2) {
    double b = s.field.b;
    A = [b](const std::array<double, 2>& x) {
      return std::array<double, 2>{-b * x[1] / 2, b * x[0] / 2};
    };
  } else {
    A = [](const std::array<double, 2>&) {
      return std::array<double, 2>{0, 0};
    };
  }

  GridModel m = build_grid(s.dim, s.shape, s.spacing,
                           s.boundary == "periodic_torus"
                               ? Boundary::periodic_torus
                               : Boundary::dirichlet_box,
                           V, A);

  if (s.field.kind == "table") {
    auto rows = read_csv(s.field.table_path, 3);
    for (const auto& r : rows) {
      int tail = (int)r[0], head = (int)r[1];
      bool found = false;
      for (int e : m.incident[tail]) {
        Edge& ed = m.edges[e];
        if (ed.tail == tail && ed.head == head) {
          ed.phase = r[2];
          found = true;
          break;
        }
        if (ed.head == tail && ed.tail == head) {
          ed.phase = -r[2];
          found = true;
          break;
        }
      }
      if (!found)
        throw ConfigError("config", "field table edge is not a grid edge");
    }
  }
  return m;
}

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> k = {
      "thmD",  "lemma_kh", "thm_equiv",       "decay_p10a",
      "weyl",  "roe",      "wannier",         "energy_identity"};
  return k;
}

SweepConfig parse_sweep_config(const json& j) {
  SweepConfig c;
  c.model = parse_model_spec(j.contains("model") ? j["model"] : j);
  c.E0 = get_num(j, "E0", 0.9);
  c.E1 = get_num(j, "E1", 0.5);
  c.E2 = get_num(j, "E2", c.E1 + 0.2 * (c.E0 - c.E1));
  c.E3 = get_num(j, "E3", c.E1 + 0.6 * (c.E0 - c.E1));
  c.eta = get_num(j, "eta", (c.E0 - c.E1) / 4);
  if (!(c.E1 < c.E0))
    throw ConfigError("config", "thresholds must satisfy E1 < E0");
  if (j.contains("mu_list")) {
    for (const auto& v : j["mu_list"]) c.mu_list.push_back(v.get<double>());
  } else if (j.contains("mu")) {
    c.mu_list.push_back(j["mu"].get<double>());
  }
  for (size_t i = 1; i < c.mu_list.size(); ++i)
    if (c.mu_list[i] <= c.mu_list[i - 1])
      throw ConfigError("config", "mu_list must be strictly increasing");
  if (j.contains("experiments")) {
    for (const auto& e : j["experiments"]) {
      std::string name = e.get<std::string>();
      if (std::find(known_experiments().begin(), known_experiments().end(),
                    name) == known_experiments().end())
        throw ConfigError("config", "unknown experiment " + name);
      c.experiments.push_back(name);
    }
  } else {
    c.experiments = known_experiments();
  }
  c.seed = (unsigned)get_num(j, "seed", 1);
  c.cache_dir = j.value("cache", std::string());
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config", std::string("bad JSON: ") + e.what());
  }
  return parse_sweep_config(j);
}

SweepConfig default_benchmark_config() {
  json j = {
      {"model",
       {{"dim", 1},
        {"shape", {2048}},
        {"spacing", 1.0 / 512},
        {"boundary", "periodic_torus"},
        {"potential", {{"kind", "cosine_wells"}, {"amplitude", 1.0},
                       {"period", 1.0}}},
        {"field", {{"kind", "zero"}}}}},
      {"E0", 0.9},  {"E1", 0.5}, {"E2", 0.6}, {"E3", 0.75}, {"eta", 0.1},
      {"mu_list", {100.0, 200.0, 400.0, 800.0}},
      {"seed", 1}};
  return parse_sweep_config(j);
}

GapChoice choose_lambda(const std::vector<double>& merged, double sup_min,
                        double level) {
  GapChoice out;
  std::vector<double> inside;
  for (double v : merged)
    if (v >= sup_min && v <= level) inside.push_back(v);
  if (inside.empty()) return out;
  std::sort(inside.begin(), inside.end());
  GapList gaps = detect_gaps(inside, sup_min, level);
  double best_w = 0;
  for (size_t i = 0; i < gaps.intervals.size(); ++i)
    if (gaps.widths[i] > best_w) {
      best_w = gaps.widths[i];
      out.lo = gaps.intervals[i].first;
      out.hi = gaps.intervals[i].second;
      out.found = true;
    }
  // Trailing clipped gap up to E1*mu.
  double trail = level - inside.back();
  if (trail > best_w) {
    out.lo = inside.back();
    out.hi = level;
    out.found = true;
  }
  if (out.found) out.lambda = 0.5 * (out.lo + out.hi);
  return out;
}

namespace {

struct EigCacheData {
  std::vector<double> merged;
  std::vector<std::vector<double>> per_well;
  std::optional<std::vector<double>> full;
};

std::string cache_file(const SweepConfig& c, double mu) {
  json key = {{"model", model_spec_to_json(c.model)},
              {"E0", c.E0},
              {"E1", c.E1},
              {"E2", c.E2},
              {"E3", c.E3},
              {"eta", c.eta}};
  uint64_t bits;
  std::memcpy(&bits, &mu, sizeof(bits));
  return c.cache_dir + "/" + hex64(fnv1a(key.dump())) + "_mu" + hex64(bits) +
         ".json";
}

std::optional<EigCacheData> cache_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json j;
    in >> j;
    EigCacheData d;
    d.merged = j.at("merged").get<std::vector<double>>();
    d.per_well = j.at("per_well").get<std::vector<std::vector<double>>>();
    if (j.contains("full"))
      d.full = j["full"].get<std::vector<double>>();
    return d;
  } catch (...) {
    return std::nullopt;
  }
}

void cache_save(const std::string& path, const EigCacheData& d) {
  json j{{"merged", d.merged}, {"per_well", d.per_well}};
  if (d.full) j["full"] = *d.full;
  std::ofstream out(path);
  out << j.dump();
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  SweepResult result;
  if (config.mu_list.empty()) return result;

  GridModel model = build_model(config.model);
  WellDecomposition decomp = find_wells(model, config.E0);
  CutoffFamily cutoffs = build_cutoffs(model, decomp, config.E1, config.eta);
  double sup_min =
      *std::max_element(decomp.well_minima.begin(), decomp.well_minima.end());
  if (!config.cache_dir.empty())
    std::filesystem::create_directories(config.cache_dir);

  for (size_t mi = 0; mi < config.mu_list.size(); ++mi) {
    const double mu = config.mu_list[mi];
    SweepRow row;
    row.mu = mu;
    row.ok = true;
    const double level = config.E1 * mu;
    const unsigned probe_seed = config.seed + 1000 * (unsigned)mi;

    auto fail = [&](const std::string& exp, const std::string& msg) {
      row.ok = false;
      if (!row.error.empty()) row.error += "; ";
      row.error = row.error + exp + ": " + msg;
    };

    try {
      SparseHermitian H = assemble_hamiltonian(model, mu);

      std::string cpath =
          config.cache_dir.empty() ? "" : cache_file(config, mu);
      std::optional<EigCacheData> cached =
          cpath.empty() ? std::nullopt : cache_load(cpath);

      // Well spectra (with eigenvectors) computed lazily; the merged values
      // come from the cache when available.
      std::optional<WellSpectra> ws;
      auto well_spectra = [&]() -> WellSpectra& {
        if (!ws) ws = well_spectrum(decomp, H, -1e-9, level);
        return *ws;
      };
      std::vector<double> merged;
      if (cached) {
        merged = cached->merged;
      } else {
        merged = well_spectra().merged;
      }

      GapChoice gap = choose_lambda(merged, sup_min, level);
      row.gap_found = gap.found;
      row.gap_lo = gap.lo;
      row.gap_hi = gap.hi;
      row.lambda = gap.lambda;

      std::optional<std::vector<double>> full_vals;
      if (cached && cached->full) full_vals = cached->full;
      auto full_values = [&]() -> const std::vector<double>& {
        if (!full_vals)
          full_vals = eig_window_or_dense(H, -1e-9, level).eigenvalues;
        return *full_vals;
      };

      std::optional<ProjectionMatrix> riesz;
      auto riesz_E = [&]() -> ProjectionMatrix& {
        if (!riesz) {
          if (!gap.found) throw NotInGap("no gap below E1*mu");
          riesz = riesz_projection(H, gap.lambda);
        }
        return *riesz;
      };

      std::optional<std::pair<ProjectionMatrix, GramData>> quasi;
      auto quasi_P = [&]() -> std::pair<ProjectionMatrix, GramData>& {
        if (!quasi) {
          if (!gap.found) throw NotInGap("no gap below E1*mu");
          quasi = build_quasi_projection(decomp, cutoffs,
                                         well_spectra().per_well, gap.lambda);
        }
        return *quasi;
      };

      for (const std::string& exp : config.experiments) {
        try {
          if (exp == "thmD") {
            auto [dists, mx] = spectral_distance(full_values(), merged);
            (void)dists;
            row.metrics["thmD_max_dist"] = mx;
          } else if (exp == "lemma_kh") {
            if (!gap.found) throw NotInGap("no gap below E1*mu");
            ParametrixOps ops =
                build_parametrix(H, decomp, cutoffs, cplx(gap.lambda, 0));
            double kn = defect_norm(ops);
            row.metrics["kh_defect"] = kn;
            // c1: smallest weight value on the psi transition band.
            double c1 = std::numeric_limits<double>::infinity();
            for (int h = 0; h < decomp.num_wells(); ++h) {
              ScalarField Phi =
                  build_weight(model, decomp, config.E2, config.E3, h);
              for (int s : decomp.components[h]) {
                double psv = cutoffs.psi_h[h].values[s];
                if (psv > 0 && psv < 1)
                  c1 = std::min(c1, Phi.values[s]);
              }
            }
            if (std::isfinite(c1)) row.metrics["kh_c1"] = c1;
            if (kn < 0.5) {
              std::mt19937 gen(probe_seed);
              std::normal_distribution<double> nd(0, 1);
              double worst = 0;
              for (int p = 0; p < 10; ++p) {
                Eigen::VectorXcd v(H.n());
                for (int i = 0; i < H.n(); ++i) v[i] = cplx(nd(gen), nd(gen));
                Eigen::VectorXcd direct =
                    resolvent_apply(H, cplx(gap.lambda, 0), v);
                Eigen::VectorXcd recon = parametrix_solve(ops, v);
                worst = std::max(worst,
                                 (direct - recon).norm() / direct.norm());
              }
              row.metrics["kh_reconstruction_err"] = worst;
            }
          } else if (exp == "thm_equiv") {
            ProjectionMatrix& E = riesz_E();
            auto& [P, gd] = quasi_P();
            double nrm = projection_gap_norm(E, P);
            row.metrics["equiv_norm_EP"] = nrm;
            row.metrics["equiv_rank_E"] = E.rank;
            row.metrics["equiv_rank_P"] = P.rank;
            row.metrics["equiv_gram_dev"] = gd.max_deviation;
            if (nrm < 1) {
              Eigen::MatrixXcd W = mvn_partial_isometry(E, P);
              row.metrics["equiv_mvn_res_E"] =
                  hermitian_norm(W.adjoint() * W - E.P);
              row.metrics["equiv_mvn_res_P"] =
                  hermitian_norm(W * W.adjoint() - P.P);
            }
            DecompositionResiduals dr = decomposition_check(
                E, decomp, cutoffs, well_spectra().per_well, gap.lambda);
            row.metrics["equiv_dec_psi_phi"] = dr.psi_phi;
            row.metrics["equiv_dec_phi_phi"] = dr.phi_phi;
          } else if (exp == "decay_p10a") {
            WellSpectra& w = well_spectra();
            for (int h = 0; h < decomp.num_wells(); ++h)
              for (int j = 0; j < w.per_well[h].count(); ++j) {
                Eigen::VectorXcd u = w.per_well[h].eigenvectors.col(j);
                u.normalize();
                double mass =
                    eigenfunction_decay(model, decomp, h, config.E2, u);
                row.metrics["p10a_h" + std::to_string(h) + "_j" +
                            std::to_string(j)] = mass;
              }
          } else if (exp == "weyl") {
            auto counts = count_states(decomp, H, config.E1, mu);
            int total = 0;
            for (int h = 0; h < (int)counts.size(); ++h) {
              row.metrics["weyl_h" + std::to_string(h)] = counts[h];
              total += counts[h];
            }
            row.metrics["weyl_total"] = total;
          } else if (exp == "roe") {
            ProjectionMatrix& E = riesz_E();
            double extent = 0;
            for (int ax = 0; ax < model.dim; ++ax)
              extent = std::max(
                  extent, model.shape[ax] * model.spacing /
                              (model.boundary == Boundary::periodic_torus
                                   ? 2.0
                                   : 1.0));
            std::vector<double> radii;
            for (double R = 0; R <= extent; R += extent / 40) radii.push_back(R);
            PropagationProfile prof = propagation_profile(E.P, model, radii);
            if (prof.fit_valid) {
              row.metrics["roe_nu"] = prof.nu;
              row.metrics["roe_prefactor"] = prof.prefactor;
              row.metrics["roe_r2"] = prof.r_squared;
              // Band truncation at the middle of the fitted tail.
              double Rmid = 0;
              int tail = 0;
              for (size_t i = 0; i < radii.size(); ++i)
                if (prof.sup_offdiag[i] > 1e-14 &&
                    prof.sup_offdiag[i] < prof.sup_offdiag[0]) {
                  Rmid += radii[i];
                  ++tail;
                }
              if (tail > 0) {
                Rmid /= tail;
                auto [banded, err] = band_truncate(E.P, model, Rmid);
                (void)banded;
                row.metrics["roe_band_R"] = Rmid;
                row.metrics["roe_band_err"] = err;
                // Fit-implied bound on the truncation error in operator
                // norm: the dropped kernel is entrywise below C e^{-nu d},
                // so a Schur (row-sum) bound applies.
                double pred = 0;
                for (int i = 0; i < E.n(); ++i) {
                  double s = 0;
                  for (int j = 0; j < E.n(); ++j) {
                    if (j == i) continue;
                    double dd = model.site_distance(i, j);
                    if (dd > Rmid)
                      s += prof.prefactor * std::exp(-prof.nu * dd);
                  }
                  pred = std::max(pred, s);
                }
                row.metrics["roe_fit_at_R"] = pred;
              }
            }
          } else if (exp == "wannier") {
            auto& [P, gd] = quasi_P();
            (void)gd;
            // Per-well orthonormal subspaces = consecutive basis blocks.
            std::vector<Eigen::MatrixXcd> subspaces;
            int at = 0;
            for (int h = 0; h < decomp.num_wells(); ++h) {
              int m = 0;
              for (double v : well_spectra().per_well[h].eigenvalues)
                if (v <= gap.lambda) ++m;
              subspaces.push_back(P.basis.middleCols(at, m));
              at += m;
            }
            WannierFrame frame =
                build_wannier_frame(decomp, subspaces, model);
            row.metrics["wannier_residual"] = conjugation_check(frame, P);
            row.metrics["wannier_Dprime_size"] = (double)frame.d_prime.size();
            row.metrics["wannier_n_max"] = frame.n_max;
            // Exact finite propagation: sup of |P(x,y)| beyond delta.
            double beyond = 0;
            for (int i = 0; i < P.n(); ++i)
              for (int j = 0; j < P.n(); ++j)
                if (model.site_distance(i, j) > decomp.max_diameter)
                  beyond = std::max(beyond, std::abs(P.P(i, j)));
            row.metrics["wannier_sup_beyond_delta"] = beyond;
          } else if (exp == "energy_identity") {
            WellSpectra& w = well_spectra();
            if (w.per_well[0].count() == 0)
              throw EmptyWellSpectrum("no well-0 state below E1*mu");
            Eigen::VectorXcd u = embed(w.per_well[0].eigenvectors.col(0),
                                       decomp.components[0], H.n());
            ScalarField Phi =
                build_weight(model, decomp, config.E2, config.E3, 0);
            row.metrics["energy_residual"] = energy_identity_residual(
                H, model, Phi, cplx(w.per_well[0].eigenvalues[0], 0), u);
          }
        } catch (const Error& e) {
          fail(exp, e.what());
        }
      }

      if (!cpath.empty() && !cached) {
        EigCacheData d;
        d.merged = merged;
        if (ws)
          for (const auto& pw : ws->per_well) d.per_well.push_back(pw.eigenvalues);
        d.full = full_vals;
        cache_save(cpath, d);
      }
    } catch (const Error& e) {
      fail("setup", e.what());
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

DecayFit fit_exponential_rate(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw TooFewPoints("need at least 3 (mu, value) points");
  std::vector<std::pair<double, double>> usable;
  for (auto [mu, v] : points)
    if (v > 1e-14) usable.emplace_back(std::sqrt(mu), std::log(v));
  if (usable.empty()) throw AllBelowFloor("all values at round-off floor");
  if (usable.size() < 3)
    throw TooFewPoints("fewer than 3 values above the floor");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : usable) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double m = (double)usable.size();
  DecayFit fit;
  fit.used_points = (int)usable.size();
  double denom = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ssres = 0, sstot = 0, ybar = sy / m;
  for (auto [x, y] : usable) {
    double e = y - (fit.slope * x + fit.intercept);
    ssres += e * e;
    sstot += (y - ybar) * (y - ybar);
  }
  fit.r_squared = sstot > 0 ? 1.0 - ssres / sstot : 1.0;
  return fit;
}

json SweepResult::to_json() const {
  json arr = json::array();
  for (const auto& r : rows) {
    json row{{"mu", r.mu},         {"ok", r.ok},
             {"error", r.error},   {"gap_found", r.gap_found},
             {"gap_lo", r.gap_lo}, {"gap_hi", r.gap_hi},
             {"lambda", r.lambda}};
    for (const auto& [k, v] : r.metrics) row[k] = v;
    arr.push_back(std::move(row));
  }
  return arr;
}

std::string SweepResult::to_csv() const {
  std::set<std::string> keys;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.metrics) keys.insert(k);
  std::ostringstream out;
  out.precision(17);
  out << "mu,ok,gap_found,gap_lo,gap_hi,lambda";
  for (const auto& k : keys) out << "," << k;
  out << ",error\n";
  for (const auto& r : rows) {
    out << r.mu << "," << (r.ok ? 1 : 0) << "," << (r.gap_found ? 1 : 0)
        << "," << r.gap_lo << "," << r.gap_hi << "," << r.lambda;
    for (const auto& k : keys) {
      auto it = r.metrics.find(k);
      out << ",";
      if (it != r.metrics.end()) out << it->second;
    }
    out << ",\"" << r.error << "\"\n";
  }
  return out.str();
}

}  // namespace semiwell
