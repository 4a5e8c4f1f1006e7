//---------------------------------------------------------------------------
// seqlab_cli — command line front end for the sequence laboratory.
//
// Subcommands: generate | encode | group | percolate | witness | verify |
// dimension | montecarlo | pipeline.  All artifacts are deterministic for a
// fixed seed.  Exit codes: 0 on success, 1 on usage or input errors, 2 on
// internal errors.
//---------------------------------------------------------------------------

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqlab/reporting.hpp"
#include "seqlab/seqlab.hpp"

namespace {

using namespace seqlab;

//---------------------------------------------------------------------------
// Small IO helpers.
//---------------------------------------------------------------------------
void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open output file: " + path);
  f << text;
}

std::string dumps(const ojson& j) { return j.dump(2) + "\n"; }

ojson load_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open input file: " + path);
  try {
    ojson j;
    f >> j;
    return j;
  } catch (const std::exception& e) {
    throw usage_error("cannot parse " + path + ": " + e.what());
  }
}

// Bits stored in an artifact as {"length": n, "bits_base64": ...}.
Bits bits_from_artifact(const ojson& j) {
  const auto n = j.at("length").get<std::int64_t>();
  if (n < 0) throw usage_error("artifact: negative bit length");
  return unpack_bits_base64(j.at("bits_base64").get<std::string>(),
                            static_cast<std::size_t>(n));
}

void require_json(const std::string& format, const char* cmd) {
  if (format != "json")
    throw usage_error(std::string(cmd) + ": only --format json is available here");
}

//---------------------------------------------------------------------------
// generate
//---------------------------------------------------------------------------
struct GenerateOpts {
  std::int64_t window = 64;
  double p = 0.5;
  std::uint64_t seed = 1;
  std::string out, format = "json";
};

void run_generate(const GenerateOpts& o) {
  require_json(o.format, "generate");
  const Bits b = sample_bernoulli(o.window, o.p, o.seed);
  std::int64_t ones = 0;
  for (std::uint8_t v : b) ones += v;
  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "generate";
  j["config"] = {{"window_length", o.window}, {"p", o.p}, {"seed", o.seed}};
  j["length"] = static_cast<std::int64_t>(b.size());
  j["ones"] = ones;
  j["bits_base64"] = pack_bits_base64(b);
  write_output(o.out, dumps(j));
}

//---------------------------------------------------------------------------
// encode
//---------------------------------------------------------------------------
struct EncodeOpts {
  std::string bits, in, out, format = "json";
};

void run_encode(const EncodeOpts& o) {
  require_json(o.format, "encode");
  if (o.bits.empty() == o.in.empty())
    throw usage_error("encode: provide exactly one of --bits or --in");
  Bits b;
  if (!o.bits.empty()) {
    b.reserve(o.bits.size());
    for (char c : o.bits) {
      if (c != '0' && c != '1')
        throw usage_error("encode: --bits must contain only 0 and 1");
      b.push_back(static_cast<std::uint8_t>(c - '0'));
    }
  } else {
    b = bits_from_artifact(load_json(o.in));
  }
  const WeightedWord w = encode(b);
  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "encode";
  j["length"] = static_cast<std::int64_t>(b.size());
  j["word"] = {{"w", w.w}, {"last_run_complete", w.last_run_complete}};
  j["decoded_length"] = decoded_length(w.w);
  write_output(o.out, dumps(j));
}

//---------------------------------------------------------------------------
// group
//---------------------------------------------------------------------------
struct GroupOpts {
  std::int64_t window = 4096;
  double p = 1e-4;
  std::uint64_t seed = 1;
  std::int64_t L = 0;  // when set, M defaults to 3(L+1)
  std::int64_t M = 9;
  bool m_explicit = false;
  std::string in, out, format = "json";
};

void run_group(const GroupOpts& o) {
  require_json(o.format, "group");
  std::int64_t M = o.M;
  if (o.L != 0 && !o.m_explicit) M = HierarchySpec::of(o.L).M;
  const Bits xi =
      o.in.empty() ? sample_bernoulli(o.window, o.p, o.seed)
                   : bits_from_artifact(load_json(o.in));
  const ClusterForest f = build_forest(xi, M);
  const ChiResult c = chi(f);

  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "group";
  j["config"] = {{"window_length", static_cast<std::int64_t>(xi.size())},
                 {"p", o.p},
                 {"seed", o.seed},
                 {"M", M}};
  j["gamma_size"] = static_cast<std::int64_t>(f.gamma.size());
  j["chi"] = {{"determined", c.determined},
              {"value", c.determined ? ojson(c.chi) : ojson(nullptr)}};
  ojson clusters = ojson::array();
  for (std::int64_t id : f.final_partition) {
    const ClusterNode& n = f.node(id);
    clusters.push_back({{"id", n.id},
                        {"level", n.level},
                        {"mass", n.mass},
                        {"alpha", n.alpha},
                        {"omega", n.omega},
                        {"provisional", n.provisional},
                        {"member_count", n.member_count()},
                        {"diameter", n.diam()}});
  }
  j["clusters"] = std::move(clusters);
  if (c.determined && c.chi == 0) {
    const WeightedWord psi = psi_from_xi(f);
    ojson nz = ojson::array();
    for (std::int64_t r = 1; r <= psi.length(); ++r)
      if (psi.w[static_cast<std::size_t>(r - 1)] > 0)
        nz.push_back(ojson::array({r, psi.w[static_cast<std::size_t>(r - 1)]}));
    j["psi"] = {{"length", psi.length()}, {"nonzero", std::move(nz)}};
    const std::vector<std::int64_t> dels = thin_deletions(f);
    j["thinning"] = {{"deletions", static_cast<std::int64_t>(dels.size())},
                     {"thinned_length",
                      static_cast<std::int64_t>(xi.size()) -
                          static_cast<std::int64_t>(dels.size())}};
  } else {
    j["psi"] = nullptr;
    j["thinning"] = nullptr;
  }
  write_output(o.out, dumps(j));
}

//---------------------------------------------------------------------------
// percolate
//---------------------------------------------------------------------------
struct PercolateOpts {
  std::int64_t L = 2;
  std::int64_t window = 4096;
  double p = 1e-4;
  std::uint64_t seed = 1;
  std::int64_t depth = -1;
  std::string svg, out, format = "json";
};

std::string percolate_svg(const PercWindow& pw, std::int64_t depth,
                          const std::optional<PermittedPath>& path) {
  const std::int64_t xf =
      path && !path->vertices.empty() ? path->vertices.back().x : 0;
  const std::int64_t width_shown =
      std::min<std::int64_t>(pw.width(), std::max<std::int64_t>(xf + 2, 40));
  if ((depth + 1) * width_shown > 80000)
    throw usage_error(
        "percolate: svg grid too large; reduce --depth or --window");
  const int cs = 8;  // cell size in px
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
    << (width_shown + 1) * cs << "\" height=\"" << (depth + 2) * cs << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (std::int64_t row = 1; row <= depth; ++row) {
    const std::int64_t w = pw.psi_at(row);
    if (w <= 0) continue;
    s << "<rect x=\"0\" y=\"" << row * cs << "\" width=\""
      << (width_shown + 1) * cs << "\" height=\"" << cs
      << "\" fill=\"#f6e3e3\"/>\n";
    for (std::int64_t x = 1; x <= width_shown; ++x)
      if (pw.zeta->at(x) >= w)
        s << "<rect x=\"" << x * cs << "\" y=\"" << row * cs << "\" width=\""
          << cs << "\" height=\"" << cs << "\" fill=\"#7cb87c\"/>\n";
  }
  if (path) {
    s << "<polyline fill=\"none\" stroke=\"#c03030\" stroke-width=\"2\" "
         "points=\"";
    for (const Vertex& v : path->vertices)
      if (v.x <= width_shown)
        s << (v.x * cs + cs / 2) << ',' << (v.row * cs + cs / 2) << ' ';
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void run_percolate(const PercolateOpts& o) {
  require_json(o.format, "percolate");
  const HierarchySpec spec = HierarchySpec::of(o.L);
  const Bits xi = sample_bernoulli(o.window, o.p, o.seed);
  const ClusterForest f = build_forest(xi, spec.M);
  const ChiResult c = chi(f);

  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "percolate";
  j["config"] = {{"L", o.L},          {"window_length", o.window},
                 {"p", o.p},          {"seed", o.seed},
                 {"depth", o.depth},  {"M", spec.M}};
  if (!c.determined || c.chi != 0) {
    j["status"] = c.determined ? "chi_positive" : "chi_not_determined";
    write_output(o.out, dumps(j));
    return;
  }
  const WeightedWord psi = psi_from_xi(f);
  const std::int64_t height = psi.length();
  std::int64_t max_w = 0;
  for (std::int64_t v : psi.w) max_w = std::max(max_w, v);
  std::int64_t depth;
  if (o.depth >= 0) {
    depth = std::min(o.depth, height);
  } else if (max_w >= 1) {
    // Default: stop just below the first row carrying the maximal weight.
    depth = *first_index_at_least(psi, max_w) - 1;
  } else {
    depth = height;
  }

  j["status"] = "ok";
  j["psi_height"] = height;
  j["max_weight"] = max_w;
  j["depth"] = depth;
  j["m_spaced"] = is_M_spaced(psi, spec.M).ok;

  PercWindow pw = make_hier_perc_window(spec, 0, o.window, psi);
  const std::vector<FilteredReach> reach = compute_reach(pw, depth);
  ojson rj = ojson::array();
  for (const FilteredReach& fr : reach) {
    ojson ivs = ojson::array();
    for (const auto& [lo, hi] : fr.ivs) ivs.push_back(ojson::array({lo, hi}));
    rj.push_back({{"row", fr.row}, {"weight", fr.weight},
                  {"intervals", std::move(ivs)}});
  }
  j["reach"] = std::move(rj);
  const std::optional<PermittedPath> path = find_permitted_path(pw, depth);
  if (path) {
    ojson heavy = ojson::array();
    for (std::size_t m : path->heavy_marks) {
      const Vertex& v = path->vertices[m];
      heavy.push_back(ojson::array({v.row, v.x}));
    }
    j["path"] = {{"found", true},
                 {"x_final", path->vertices.back().x},
                 {"heavy", std::move(heavy)}};
  } else {
    j["path"] = {{"found", false}};
  }
  if (!o.svg.empty()) write_output(o.svg, percolate_svg(pw, depth, path));
  write_output(o.out, dumps(j));
}

//---------------------------------------------------------------------------
// witness / verify
//---------------------------------------------------------------------------
struct WitnessOpts {
  std::int64_t L = 2;
  std::int64_t window = 4096;
  double p = 1e-4;
  std::uint64_t seed = 1;
  std::int64_t depth = -1;
  std::int64_t budget = 4000000;
  std::string level = "weighted";
  std::string out, format = "json";
};

void run_witness(const WitnessOpts& o) {
  require_json(o.format, "witness");
  if (o.level != "weighted" && o.level != "binary")
    throw usage_error("witness: --level must be weighted or binary");
  ExperimentConfig cfg;
  cfg.L = o.L;
  cfg.p = o.p;
  cfg.window_length = o.window;
  cfg.depth = o.depth;
  cfg.trials = 1;
  cfg.seed = o.seed;
  cfg.binary_budget = o.budget;
  cfg.validate();

  WitnessCapture cap;
  const TrialRecord rec = run_trial(cfg, 0, &cap);

  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "witness";
  j["level"] = o.level;
  j["config"] = {{"L", o.L},
                 {"p", o.p},
                 {"window_length", o.window},
                 {"depth", rec.path_depth_target},
                 {"seed", o.seed},
                 {"binary_budget", o.budget}};
  j["status"] = rec.success ? "ok" : rec.failure_reason;
  if (rec.success) {
    if (o.level == "weighted") {
      j["schedule"] = schedule_json(cap.weighted);
    } else {
      j["schedule"] = schedule_json(cap.binary);
      j["eta_length"] = cap.eta_length;
      j["xi_prefix_length"] = cap.xi_prefix_length;
      j["truncated_depth"] = cap.truncated_depth;
    }
    j["witness_ok"] = rec.witness_ok;
    j["oracle_ok"] = rec.oracle_ok;
  }
  write_output(o.out, dumps(j));
}

struct VerifyOpts {
  std::string in, out, format = "json";
};

void run_verify(const VerifyOpts& o) {
  require_json(o.format, "verify");
  if (o.in.empty()) throw usage_error("verify: --in is required");
  const ojson a = load_json(o.in);
  if (a.value("kind", "") != "witness")
    throw usage_error("verify: input is not a witness artifact");
  if (a.value("status", "") != "ok")
    throw usage_error("verify: artifact does not contain a witness");
  const std::string level = a.at("level").get<std::string>();
  const ojson& cj = a.at("config");
  const std::int64_t L = cj.at("L").get<std::int64_t>();
  const double p = cj.at("p").get<double>();
  const std::int64_t window = cj.at("window_length").get<std::int64_t>();
  const std::uint64_t seed = cj.at("seed").get<std::uint64_t>();
  const HierarchySpec spec = HierarchySpec::of(L);
  const WitnessSchedule s = schedule_from_json(a.at("schedule"));

  bool ok = false;
  std::string note;
  try {
    if (level == "weighted") {
      const Bits xi = sample_bernoulli(window, p, seed);
      const ClusterForest f = build_forest(xi, spec.M);
      const ChiResult c = chi(f);
      if (!c.determined || c.chi != 0)
        throw usage_error("verify: sample does not reproduce a grouped word");
      const WeightedWord psi = psi_from_xi(f);
      const WeightedWord zw = zeta_window(spec, window);
      const auto replayed = replay_weighted(zw, psi, s);
      ok = common_prefix_length(replayed.first.w, replayed.second.w) >=
           s.target_length;
    } else if (level == "binary") {
      const std::int64_t eta_len = a.at("eta_length").get<std::int64_t>();
      const std::int64_t xi_len = a.at("xi_prefix_length").get<std::int64_t>();
      const Bits eta = eta_len > 0 ? eta_window(spec, eta_len) : Bits{};
      const Bits xi = sample_bernoulli(window, p, seed);
      if (xi_len > static_cast<std::int64_t>(xi.size()))
        throw usage_error("verify: xi prefix exceeds the window");
      const Bits prefix(xi.begin(), xi.begin() + xi_len);
      BinaryReplayer re(eta), rx(prefix);
      for (const WitnessStep& st : s.steps)
        (st.side == Side::eta ? re : rx).apply(st);
      std::int64_t t = s.target_length;
      const Bits ea = re.current(), xa = rx.current();
      ok = static_cast<std::int64_t>(ea.size()) >= t &&
           static_cast<std::int64_t>(xa.size()) >= t &&
           std::equal(ea.begin(), ea.begin() + t, xa.begin());
    } else {
      throw usage_error("verify: unknown witness level " + level);
    }
  } catch (const usage_error& e) {
    ok = false;
    note = e.what();
  } catch (const boundary_error& e) {
    ok = false;
    note = e.what();
  }

  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "verify";
  j["level"] = level;
  j["target_length"] = s.target_length;
  j["replay_ok"] = ok;
  j["note"] = note;
  write_output(o.out, dumps(j));
}

//---------------------------------------------------------------------------
// dimension
//---------------------------------------------------------------------------
struct DimensionOpts {
  std::int64_t L = 2;
  std::int64_t n_max = 4782969;  // 9^7
  std::string out, format = "json";
};

void run_dimension(const DimensionOpts& o) {
  const HierarchySpec spec = HierarchySpec::of(o.L);
  const std::int64_t r = spec.M;
  const std::vector<std::int64_t> zs = zero_set(spec, o.n_max);
  const IntegerSet set = IntegerSet::of(zs, /*reflect=*/true);

  const MassDimReport mass = mass_dim_estimate(set, r, o.n_max);
  const HausdorffReport haus = hausdorff_dim_estimate(set, r, o.n_max);
  const EntropyReport ent = entropy_index(set, r, o.n_max);

  std::int64_t n_hi = 0;
  for (std::int64_t v = 1; v <= o.n_max / r; v *= r) ++n_hi;
  const double alpha =
      std::log(static_cast<double>(o.L)) / std::log(static_cast<double>(r));
  std::optional<GrowthBoundReport> origin, pointwise;
  if (n_hi >= 3) {
    origin = check_origin_growth(set, r, alpha, 1, n_hi);
    pointwise = check_pointwise_growth(set, r, alpha, 1, n_hi);
  }

  if (o.format == "csv") {
    std::ostringstream s;
    s << "code_version,L,M,n_max,zero_set_size,mass_lower,mass_upper,"
         "hausdorff,entropy,origin_growth_ok,pointwise_growth_ok\n";
    s << kCodeVersion << ',' << o.L << ',' << r << ',' << o.n_max << ','
      << zs.size() << ',' << detail::num(mass.lower) << ','
      << detail::num(mass.upper) << ',' << detail::num(haus.estimate) << ','
      << detail::num(ent.estimate) << ','
      << (origin ? (origin->holds ? "true" : "false") : "") << ','
      << (pointwise ? (pointwise->holds ? "true" : "false") : "") << '\n';
    write_output(o.out, s.str());
    return;
  }

  auto growth_json = [](const std::optional<GrowthBoundReport>& g) -> ojson {
    if (!g) return nullptr;
    return ojson{{"holds", g->holds},
                 {"lower_ok", g->lower_ok},
                 {"upper_ok", g->upper_ok},
                 {"c_prime", g->c_prime},
                 {"c", g->c}};
  };
  ojson j;
  j["code_version"] = kCodeVersion;
  j["kind"] = "dimension";
  j["config"] = {{"L", o.L}, {"M", r}, {"n_max", o.n_max}};
  j["zero_set_size"] = static_cast<std::int64_t>(zs.size());
  j["mass"] = {{"scales", mass.scales},
               {"counts", mass.counts},
               {"log_ratios", mass.log_ratios},
               {"lower", mass.lower},
               {"upper", mass.upper}};
  j["hausdorff"] = {{"estimate", haus.estimate}};
  j["entropy"] = {{"estimate", ent.estimate}};
  j["growth"] = {{"alpha", alpha},
                 {"origin", growth_json(origin)},
                 {"pointwise", growth_json(pointwise)}};
  write_output(o.out, dumps(j));
}

//---------------------------------------------------------------------------
// montecarlo
//---------------------------------------------------------------------------
struct MonteCarloOpts {
  ExperimentConfig cfg;
  std::vector<double> sweep;

  MonteCarloOpts() {
    cfg.window_length = 100000;
    cfg.trials = 500;
    cfg.p = 1.0 / 10368.0;
  }
};

void run_montecarlo(const MonteCarloOpts& o) {
  const std::vector<ChiZeroReport> reps =
      o.sweep.empty() ? std::vector<ChiZeroReport>{estimate_chi_zero(o.cfg)}
                      : chi_zero_sweep(o.cfg, o.sweep);
  if (o.cfg.format == "csv")
    write_output(o.cfg.output_path, chi_zero_csv(o.cfg, reps));
  else
    write_output(o.cfg.output_path, dumps(chi_zero_json(o.cfg, reps)));
}

//---------------------------------------------------------------------------
// pipeline
//---------------------------------------------------------------------------
void run_pipeline_cmd(const ExperimentConfig& cfg) {
  const PipelineResult r = run_pipeline(cfg);
  if (cfg.format == "csv")
    write_output(cfg.output_path, pipeline_csv(r));
  else
    write_output(cfg.output_path, dumps(pipeline_json(r)));
}

//---------------------------------------------------------------------------
// Option wiring.  Config files are flat key=value lines (keys match the long
// flag names without the dashes); values from the file fill in exactly the
// options that were not passed explicitly.
//---------------------------------------------------------------------------
struct ConfigHolder {
  std::string path;
};

std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void apply_config_file(CLI::App* sc, const std::string& path) {
  if (path.empty()) return;
  std::ifstream f(path);
  if (!f) throw usage_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string t = trim_ws(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw usage_error(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    const std::string key = trim_ws(t.substr(0, eq));
    const std::string value = trim_ws(t.substr(eq + 1));
    if (key == "config")
      throw usage_error(path + ": nested config files are not supported");
    CLI::Option* opt = nullptr;
    try {
      opt = sc->get_option("--" + key);
    } catch (const CLI::Error&) {
      throw usage_error(path + ":" + std::to_string(lineno) +
                        ": unknown key " + key);
    }
    if (opt->count() > 0) continue;  // explicit flag wins
    opt->add_result(value);
    opt->run_callback();
  }
}

std::shared_ptr<ConfigHolder> add_config_file(CLI::App* sc) {
  auto holder = std::make_shared<ConfigHolder>();
  sc->add_option("--config", holder->path,
                 "flat key=value defaults for this subcommand; explicit flags win");
  return holder;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for hierarchical binary sequences"};
  app.set_version_flag("--version", std::string(kCodeVersion));
  app.require_subcommand(1);

  // generate
  auto gen = std::make_shared<GenerateOpts>();
  {
    CLI::App* sc = app.add_subcommand("generate", "sample a Bernoulli window");
    sc->add_option("--window", gen->window, "window length")->capture_default_str();
    sc->add_option("--p", gen->p, "one-density")->capture_default_str();
    sc->add_option("--seed", gen->seed, "random seed")->capture_default_str();
    sc->add_option("--out", gen->out, "output path (default stdout)");
    sc->add_option("--format", gen->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([gen, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_generate(*gen);
    });
  }

  // encode
  auto enc = std::make_shared<EncodeOpts>();
  {
    CLI::App* sc =
        app.add_subcommand("encode", "run-length encode a binary sequence");
    sc->add_option("--bits", enc->bits, "literal 0/1 string");
    sc->add_option("--in", enc->in, "generate artifact to encode");
    sc->add_option("--out", enc->out, "output path (default stdout)");
    sc->add_option("--format", enc->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([enc, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_encode(*enc);
    });
  }

  // group
  auto grp = std::make_shared<GroupOpts>();
  {
    CLI::App* sc = app.add_subcommand(
        "group", "build the cluster forest of a sampled window");
    sc->add_option("--window", grp->window, "window length")->capture_default_str();
    sc->add_option("--p", grp->p, "one-density")->capture_default_str();
    sc->add_option("--seed", grp->seed, "random seed")->capture_default_str();
    sc->add_option("--L", grp->L, "derive M = 3(L+1) from this L");
    CLI::Option* mopt =
        sc->add_option("--M", grp->M, "grouping scale (>= 3)")->capture_default_str();
    sc->add_option("--in", grp->in, "generate artifact to group instead of sampling");
    sc->add_option("--out", grp->out, "output path (default stdout)");
    sc->add_option("--format", grp->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([grp, mopt, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      grp->m_explicit = mopt->count() > 0;
      run_group(*grp);
    });
  }

  // percolate
  auto perc = std::make_shared<PercolateOpts>();
  {
    CLI::App* sc = app.add_subcommand(
        "percolate", "percolate a grouped window against the environment");
    sc->add_option("--L", perc->L, "branching parameter")->capture_default_str();
    sc->add_option("--window", perc->window, "window length")->capture_default_str();
    sc->add_option("--p", perc->p, "one-density")->capture_default_str();
    sc->add_option("--seed", perc->seed, "random seed")->capture_default_str();
    sc->add_option("--depth", perc->depth,
                   "target depth; -1 trims to just below the heaviest row")
        ->capture_default_str();
    sc->add_option("--svg", perc->svg, "also write an SVG rendering here");
    sc->add_option("--out", perc->out, "output path (default stdout)");
    sc->add_option("--format", perc->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([perc, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_percolate(*perc);
    });
  }

  // witness
  auto wit = std::make_shared<WitnessOpts>();
  {
    CLI::App* sc = app.add_subcommand(
        "witness", "extract and verify a compatibility witness");
    sc->add_option("--L", wit->L, "branching parameter")->capture_default_str();
    sc->add_option("--window", wit->window, "window length")->capture_default_str();
    sc->add_option("--p", wit->p, "one-density")->capture_default_str();
    sc->add_option("--seed", wit->seed, "random seed")->capture_default_str();
    sc->add_option("--depth", wit->depth, "target depth; -1 = full height")
        ->capture_default_str();
    sc->add_option("--budget", wit->budget, "bit budget for the binary level")
        ->capture_default_str();
    sc->add_option("--level", wit->level, "weighted|binary")->capture_default_str();
    sc->add_option("--out", wit->out, "output path (default stdout)");
    sc->add_option("--format", wit->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([wit, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_witness(*wit);
    });
  }

  // verify
  auto ver = std::make_shared<VerifyOpts>();
  {
    CLI::App* sc = app.add_subcommand(
        "verify", "replay a stored witness artifact from scratch");
    sc->add_option("--in", ver->in, "witness artifact")->required();
    sc->add_option("--out", ver->out, "output path (default stdout)");
    sc->add_option("--format", ver->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([ver, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_verify(*ver);
    });
  }

  // dimension
  auto dim = std::make_shared<DimensionOpts>();
  {
    CLI::App* sc = app.add_subcommand(
        "dimension", "discrete dimension estimators for the zero set");
    sc->add_option("--L", dim->L, "branching parameter")->capture_default_str();
    sc->add_option("--n-max", dim->n_max, "window size (bits)")->capture_default_str();
    sc->add_option("--out", dim->out, "output path (default stdout)");
    sc->add_option("--format", dim->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([dim, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_dimension(*dim);
    });
  }

  // montecarlo
  auto mc = std::make_shared<MonteCarloOpts>();
  {
    CLI::App* sc = app.add_subcommand(
        "montecarlo", "estimate the probability that chi vanishes");
    sc->add_option("--L", mc->cfg.L, "branching parameter")->capture_default_str();
    sc->add_option("--p", mc->cfg.p, "one-density")->capture_default_str();
    sc->add_option("--window", mc->cfg.window_length, "window length")
        ->capture_default_str();
    sc->add_option("--trials", mc->cfg.trials, "number of trials")
        ->capture_default_str();
    sc->add_option("--seed", mc->cfg.seed, "random seed")->capture_default_str();
    sc->add_option("--sweep", mc->sweep,
                   "comma-separated densities for a coupled sweep")
        ->delimiter(',');
    sc->add_option("--out", mc->cfg.output_path, "output path (default stdout)");
    sc->add_option("--format", mc->cfg.format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([mc, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_montecarlo(*mc);
    });
  }

  // pipeline
  auto pipe = std::make_shared<ExperimentConfig>();
  {
    CLI::App* sc = app.add_subcommand(
        "pipeline", "full sample-group-percolate-witness-verify batch");
    sc->add_option("--L", pipe->L, "branching parameter")->capture_default_str();
    sc->add_option("--p", pipe->p, "one-density")->capture_default_str();
    sc->add_option("--window", pipe->window_length, "window length")
        ->capture_default_str();
    sc->add_option("--depth", pipe->depth, "target depth; -1 = full height")
        ->capture_default_str();
    sc->add_option("--trials", pipe->trials, "number of trials")
        ->capture_default_str();
    sc->add_option("--seed", pipe->seed, "random seed; trial i uses seed^i")
        ->capture_default_str();
    sc->add_option("--oracle-cap", pipe->oracle_cap,
                   "max prefix re-checked by the DP oracle")
        ->capture_default_str();
    sc->add_option("--budget", pipe->binary_budget,
                   "bit budget for the binary witness leg")
        ->capture_default_str();
    sc->add_option("--out", pipe->output_path, "output path (default stdout)");
    sc->add_option("--format", pipe->format, "json|csv")->capture_default_str();
    auto cfgf = add_config_file(sc);
    sc->callback([pipe, sc, cfgf] {
      apply_config_file(sc, cfgf->path);
      run_pipeline_cmd(*pipe);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const boundary_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
