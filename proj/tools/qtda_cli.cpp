/**
 * Command-line front end: persistence tables, matrix-level emulation runs,
 * resource/comparison reports, gap sweeps, the fixed counterexample, and
 * Johnson-Lindenstrauss preprocessing.
 *
 * Every run is fully determined by (config, seed); identical configs produce
 * byte-identical outputs.  Exit codes: 0 success, 2 config error,
 * 3 computation infeasibility, 4 I/O error.
 */

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qtda/qtda.hpp"

namespace {

using nlohmann::json;

/** Write `text` to `path`, or stdout when the path is empty. */
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qtda::IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw qtda::IoError("write failed: " + path);
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qtda::IoError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw qtda::ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return j;
}

/** Big-O constants from the QTDA_CONSTANTS file, if set. */
std::map<std::string, double> env_constants() {
    std::map<std::string, double> out;
    const char* path = std::getenv("QTDA_CONSTANTS");
    if (!path || !*path) return out;
    const json j = load_json_file(path);
    if (!j.is_object()) throw qtda::ConfigError("constants file must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) throw qtda::ConfigError("constant '" + k + "' must be a number");
        out[k] = v.get<double>();
    }
    return out;
}

/** `--config` JSON: its keys override the parsed flag values. */
struct ConfigOverride {
    json j;
    void load(const std::string& path) {
        if (path.empty()) return;
        j = load_json_file(path);
        if (!j.is_object()) throw qtda::ConfigError("--config must be a JSON object");
    }
    template <typename T>
    void apply(const std::string& key, T& value) const {
        if (!j.is_object() || !j.contains(key)) return;
        try {
            value = j.at(key).get<T>();
        } catch (const json::exception&) {
            throw qtda::ConfigError("config key '" + key + "' has the wrong type");
        }
    }
};

/** Scale-pair selection: "all", "" (empty), or "i,j[;i,j...]". */
std::vector<std::pair<int, int>> parse_scale_pairs(const std::string& spec, int n_scales) {
    std::vector<std::pair<int, int>> out;
    if (spec.empty()) return out;
    if (spec == "all") {
        for (int i = 0; i < n_scales; ++i)
            for (int j = i; j < n_scales; ++j) out.push_back({i, j});
        return out;
    }
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        const auto comma = tok.find(',');
        if (comma == std::string::npos) throw qtda::ConfigError("bad --scales pair: " + tok);
        int i = 0, j = 0;
        try {
            i = std::stoi(tok.substr(0, comma));
            j = std::stoi(tok.substr(comma + 1));
        } catch (const std::exception&) {
            throw qtda::ConfigError("bad --scales pair: " + tok);
        }
        if (i < 0 || j < i || j >= n_scales)
            throw qtda::ConfigError("scale pair out of range: " + tok);
        out.push_back({i, j});
    }
    return out;
}

qtda::Mapping parse_mapping(const std::string& s) {
    if (s == "direct") return qtda::Mapping::direct;
    if (s == "compact") return qtda::Mapping::compact;
    throw qtda::ConfigError("mapping must be direct|compact");
}

qtda::ProjectorSpec::Mode parse_mode(const std::string& s) {
    if (s == "ideal") return qtda::ProjectorSpec::Mode::ideal;
    if (s == "poly") return qtda::ProjectorSpec::Mode::poly;
    throw qtda::ConfigError("mode must be ideal|poly");
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw qtda::ConfigError("bad integer list: " + s);
        }
    }
    return out;
}

/** Shared input options: cloud path, format, fixed-point split. */
struct InputOpts {
    std::string input, format = "csv";
    int bits = 32, frac_bits = 12;

    void attach(CLI::App* cmd, bool required = true) {
        auto* o = cmd->add_option("--input", input, "point cloud file");
        if (required) o->required();
        cmd->add_option("--format", format, "csv|json");
        cmd->add_option("--bits", bits, "fixed-point width");
        cmd->add_option("--frac-bits", frac_bits, "fixed-point fraction bits");
    }
    qtda::PointCloud load() const {
        if (format != "csv" && format != "json")
            throw qtda::ConfigError("format must be csv|json");
        return qtda::load_point_cloud(input, format, bits, frac_bits);
    }
};

/** One (i, j, k) Betti-table job result. */
struct BettiJob {
    int i, j, k;
    int beta_reduction, beta_rank, beta_laplacian;
    bool torsion;
};

int cmd_persistence(const InputOpts& in, int k_max, const std::string& scales, int jobs,
                    const std::string& out_path) {
    const qtda::PointCloud cloud = in.load();
    const qtda::DistanceMatrix dm = qtda::pairwise_distances(cloud);
    const qtda::FiltrationSchedule fs = qtda::filtration_scales(dm);
    const auto pairs = parse_scale_pairs(scales, fs.size());
    const qtda::PersistencePairing pairing =
        qtda::persistence_column_reduction(fs, dm, k_max);

    // Worker pool over (i, j, k) jobs; assembly single-threaded and ordered.
    std::vector<std::tuple<int, int, int>> work;
    for (const auto& [i, j] : pairs)
        for (int k = 0; k <= std::min(k_max, dm.n - 2); ++k) work.push_back({i, j, k});
    std::vector<BettiJob> results(work.size());
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> workers;
    for (int w = 0; w < n_workers; ++w)
        workers.push_back(std::async(std::launch::async, [&] {
            for (std::size_t t = next++; t < work.size(); t = next++) {
                const auto& [i, j, k] = work[t];
                const qtda::CliqueComplex cx_i = qtda::build_clique_complex(dm, fs, i, k_max);
                const qtda::CliqueComplex cx_j = qtda::build_clique_complex(dm, fs, j, k_max);
                BettiJob r{i, j, k, 0, 0, 0, false};
                r.beta_reduction = pairing.betti(i, j, k);
                r.beta_rank = qtda::persistent_betti_rank_formula(cx_i, cx_j, k);
                r.beta_laplacian = qtda::persistent_betti_via_laplacian(cx_i, cx_j, k);
                r.torsion = qtda::torsion_flagged(cx_i, cx_j, k);
                results[t] = r;
            }
        }));
    for (auto& f : workers) f.get();

    qtda::BettiTable table;
    bool agree = true;
    int torsion_count = 0;
    json entries = json::array();
    for (const auto& r : results) {
        table.entries[{r.i, r.j, r.k}] = r.beta_rank;
        if (r.torsion) ++torsion_count;
        const bool row_agree =
            r.torsion || (r.beta_reduction == r.beta_rank && r.beta_rank == r.beta_laplacian);
        if (!row_agree) agree = false;
        entries.push_back({{"i", r.i},
                           {"j", r.j},
                           {"k", r.k},
                           {"beta", r.beta_rank},
                           {"beta_reduction", r.beta_reduction},
                           {"beta_laplacian", r.beta_laplacian},
                           {"torsion", r.torsion}});
    }
    json pairs_json = json::array();
    for (const auto& p : pairing.pairs)
        pairs_json.push_back({{"k", p.k},
                              {"birth_scale", fs.mu(p.birth_index)},
                              {"death_scale", p.death_index < 0
                                                  ? json("inf")
                                                  : json(fs.mu(p.death_index))}});
    const json out{{"betti_table", entries},
                   {"pairs", pairs_json},
                   {"agreement", agree},
                   {"torsion_flagged", torsion_count},
                   {"n_scales", fs.size()}};
    emit(out_path, out.dump(2) + "\n");
    return agree ? 0 : 3;
}

int cmd_qtda(const InputOpts& in, int k, const std::string& scales, double delta, double eta,
             const std::string& mode_s, const std::string& mapping_s, std::uint64_t seed,
             int n_seeds, const std::string& out_path) {
    const qtda::PointCloud cloud = in.load();
    const qtda::DistanceMatrix dm = qtda::pairwise_distances(cloud);
    const qtda::FiltrationSchedule fs = qtda::filtration_scales(dm);
    auto pairs = parse_scale_pairs(scales, fs.size());
    if (pairs.size() != 1) throw qtda::ConfigError("qtda needs exactly one --scales i,j pair");
    const auto [i, j] = pairs.front();
    const qtda::CliqueComplex cx_i = qtda::build_clique_complex(dm, fs, i, k);
    const qtda::CliqueComplex cx_j = qtda::build_clique_complex(dm, fs, j, k);
    const qtda::ProjectorSpec::Mode mode = parse_mode(mode_s);
    const qtda::Mapping mapping = parse_mapping(mapping_s);
    const int truth = qtda::persistent_betti_rank_formula(cx_i, cx_j, k);

    json runs = json::array();
    int matches = 0;
    for (int s = 0; s < std::max(1, n_seeds); ++s) {
        const qtda::EmulationReport rep = qtda::estimate_persistent_betti_quantum(
            cx_i, cx_j, k, delta, eta, mode, seed + static_cast<std::uint64_t>(s), mapping);
        if (rep.beta_rounded && *rep.beta_rounded == truth) ++matches;
        runs.push_back(rep.to_json());
    }
    json out{{"classical_beta", truth},
             {"k", k},
             {"scale_pair", {i, j}},
             {"runs", runs}};
    if (n_seeds > 1) {
        out["seeds"] = n_seeds;
        out["match_rate"] = static_cast<double>(matches) / n_seeds;
    }
    emit(out_path, out.dump(2) + "\n");
    return 0;
}

qtda::CostModelInput make_cost_input(int n, int k, int d, int b, double s_k, double s_k1,
                                     double l_dk, double l_dk1, double l_pipi, double delta,
                                     double eta, const std::string& mapping_s,
                                     const std::string& memory_s) {
    qtda::CostModelInput in;
    in.N = n;
    in.k = k;
    in.d = d;
    in.b = b;
    in.S_k = s_k > 0 ? s_k : qtda::detail::binom_real(n, k + 1);
    in.S_k1 = s_k1 > 0 ? s_k1 : qtda::detail::binom_real(n, k + 2);
    in.gaps = qtda::BudgetGaps{l_dk, l_dk1, l_pipi};
    in.Delta = delta;
    in.eta = eta;
    in.mapping = parse_mapping(mapping_s);
    if (memory_s == "qrom")
        in.memory = qtda::MemoryModel::qrom;
    else if (memory_s == "qram")
        in.memory = qtda::MemoryModel::qram;
    else
        throw qtda::ConfigError("memory must be qrom|qram");
    in.constants = env_constants();
    return in;
}

int cmd_resources(const qtda::CostModelInput& in, const std::string& out_path) {
    const qtda::ResourceReport rep = qtda::total_runtime(in);
    json j = rep.to_json();
    j["note"] =
        "asymptotic claims are evaluated as formula-level identities, not measured runtimes";
    emit(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_compare(qtda::CostModelInput in, const std::string& reference,
                const std::string& sweep_sizes, const std::string& out_path) {
    std::vector<qtda::Reference> refs;
    const std::map<std::string, qtda::Reference> names{
        {"self", qtda::Reference::self},
        {"hayakawa", qtda::Reference::hayakawa},
        {"classical_textbook", qtda::Reference::classical_textbook},
        {"classical_opt", qtda::Reference::classical_opt},
        {"classical_sparse", qtda::Reference::classical_sparse},
        {"classical_power", qtda::Reference::classical_power}};
    if (reference == "all") {
        for (const auto& [name, r] : names)
            if (name != "classical_sparse" || in.has_constant("S_bar")) refs.push_back(r);
    } else {
        const auto it = names.find(reference);
        if (it == names.end()) throw qtda::ConfigError("unknown reference: " + reference);
        refs.push_back(it->second);
    }
    std::vector<int> sizes{in.N};
    if (!sweep_sizes.empty()) sizes = parse_int_list(sweep_sizes);
    std::vector<qtda::ComparisonRow> rows;
    for (int n : sizes) {
        in.N = n;
        in.S_k = qtda::detail::binom_real(n, in.k + 1);    // dense-complex sweep
        in.S_k1 = qtda::detail::binom_real(n, in.k + 2);
        for (const auto r : refs) rows.push_back(qtda::compare(in, r));
    }
    emit(out_path, qtda::comparison_to_csv(rows));
    return 0;
}

int cmd_gaps(const std::string& generator, const std::string& sizes_s, int k, int trials,
             std::uint64_t seed, const std::string& out_path) {
    qtda::SweepGenerator gen;
    if (generator == "geometric")
        gen = qtda::SweepGenerator::random_geometric;
    else if (generator == "graph")
        gen = qtda::SweepGenerator::random_graph;
    else
        throw qtda::ConfigError("generator must be geometric|graph");
    const std::vector<int> sizes = parse_int_list(sizes_s);
    const qtda::SweepResult res = qtda::gap_scaling_sweep(gen, sizes, k, trials, seed);
    emit(out_path, res.to_csv());
    return 0;
}

int cmd_zeno(const std::string& out_path) {
    const qtda::ZenoReport rep = qtda::zeno_counterexample();
    json chain = json::array();
    for (int i = 0; i < rep.kernel_chain.size(); ++i) chain.push_back(rep.kernel_chain(i));
    const json out{{"edges", rep.edge_basis},
                   {"kernel_chain", chain},
                   {"squared_overlaps", {rep.overlap_major, rep.overlap_minor}}};
    emit(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_jl(const InputOpts& in, double eps, std::uint64_t seed, const std::string& out_path) {
    const qtda::PointCloud cloud = in.load();
    const qtda::PointCloud projected = qtda::jl_project(cloud, eps, seed);
    json pts = json::array();
    for (int i = 0; i < projected.size(); ++i) {
        json row = json::array();
        for (int c = 0; c < projected.dim(); ++c) row.push_back(projected.coord(i, c));
        pts.push_back(row);
    }
    const json out{{"points", pts},
                   {"labels", projected.labels},
                   {"bits", projected.format.bits},
                   {"certificate", qtda::jl_certificate(cloud, projected, eps)},
                   {"target_dimension", projected.dim()}};
    emit(out_path, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"persistent Betti numbers: classical engines, quantum emulation, cost model"};
    app.require_subcommand(1);

    std::string config_path, out_path, scales = "all";
    std::string mapping = "direct", memory = "qrom", mode = "poly";
    int k_max = 1, jobs = 1, n_seeds = 1;
    double delta = 0.4, eta = 0.05;
    std::uint64_t seed = 1;
    InputOpts in;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config overriding flags");
        cmd->add_option("--out", out_path, "output path (default stdout)");
        cmd->add_option("--seed", seed, "RNG seed");
    };

    auto* persistence = app.add_subcommand("persistence", "Betti table by three engines");
    in.attach(persistence);
    add_common(persistence);
    persistence->add_option("--kmax", k_max, "maximum homology dimension");
    persistence->add_option("--scales", scales, "all | i,j[;i,j...]");
    persistence->add_option("--jobs", jobs, "worker threads");

    auto* qtda_cmd = app.add_subcommand("qtda", "matrix-level quantum emulation");
    in.attach(qtda_cmd);
    add_common(qtda_cmd);
    qtda_cmd->add_option("--kmax", k_max, "homology dimension k");
    qtda_cmd->add_option("--scales", scales, "one i,j pair")->required();
    qtda_cmd->add_option("--delta", delta, "additive accuracy target");
    qtda_cmd->add_option("--eta", eta, "failure probability");
    qtda_cmd->add_option("--mode", mode, "ideal|poly");
    qtda_cmd->add_option("--mapping", mapping, "direct|compact");
    qtda_cmd->add_option("--seeds", n_seeds, "number of Monte-Carlo seeds");

    int rn = 64, rk = 1, rd = 2, rb = 32;
    double rsk = 0, rsk1 = 0, l_dk = 1.0, l_dk1 = 1.0, l_pipi = 1.0;
    std::string reference = "all", sweep_sizes;
    auto add_cost_opts = [&](CLI::App* cmd) {
        cmd->add_option("--n", rn, "number of datapoints N");
        cmd->add_option("--kmax", rk, "homology dimension k");
        cmd->add_option("--dim", rd, "ambient dimension d");
        cmd->add_option("--bits", rb, "coordinate bits b");
        cmd->add_option("--s-k", rsk, "|S_k| (0: binomial bound)");
        cmd->add_option("--s-k1", rsk1, "|S_{k+1}| (0: binomial bound)");
        cmd->add_option("--lambda-dk", l_dk, "boundary gap Lambda_dk");
        cmd->add_option("--lambda-dk1", l_dk1, "boundary gap Lambda_dk1");
        cmd->add_option("--lambda-pipi", l_pipi, "projector-product gap");
        cmd->add_option("--delta", delta, "accuracy target");
        cmd->add_option("--eta", eta, "failure probability");
        cmd->add_option("--mapping", mapping, "direct|compact");
        cmd->add_option("--memory", memory, "qrom|qram");
    };
    auto* resources = app.add_subcommand("resources", "resource report for one input");
    add_common(resources);
    add_cost_opts(resources);

    auto* compare_cmd = app.add_subcommand("compare", "cost-formula comparison CSV");
    add_common(compare_cmd);
    add_cost_opts(compare_cmd);
    compare_cmd->add_option("--reference", reference,
                            "self|hayakawa|classical_*|all");
    compare_cmd->add_option("--sweep-sizes", sweep_sizes, "comma list of N values");

    std::string generator = "geometric", sizes_s = "8";
    int trials = 1;
    auto* gaps_cmd = app.add_subcommand("gaps", "empirical gap-scaling sweep CSV");
    add_common(gaps_cmd);
    gaps_cmd->add_option("--generator", generator, "geometric|graph");
    gaps_cmd->add_option("--sizes", sizes_s, "comma list of N values");
    gaps_cmd->add_option("--kmax", k_max, "homology dimension k");
    gaps_cmd->add_option("--trials", trials, "trials per size");

    auto* zeno_cmd = app.add_subcommand("zeno", "fixed counterexample overlap report");
    add_common(zeno_cmd);

    double jl_eps = 0.5;
    auto* jl_cmd = app.add_subcommand("jl", "Johnson-Lindenstrauss projection");
    in.attach(jl_cmd);
    add_common(jl_cmd);
    jl_cmd->add_option("--eps", jl_eps, "distortion tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ConfigOverride cfg;
        cfg.load(config_path);
        cfg.apply("input", in.input);
        cfg.apply("format", in.format);
        cfg.apply("bits", in.bits);
        cfg.apply("frac_bits", in.frac_bits);
        cfg.apply("kmax", k_max);
        cfg.apply("scales", scales);
        cfg.apply("delta", delta);
        cfg.apply("eta", eta);
        cfg.apply("mapping", mapping);
        cfg.apply("memory", memory);
        cfg.apply("mode", mode);
        cfg.apply("seed", seed);
        cfg.apply("jobs", jobs);
        cfg.apply("out", out_path);
        cfg.apply("seeds", n_seeds);
        cfg.apply("n", rn);
        cfg.apply("s_k", rsk);
        cfg.apply("s_k1", rsk1);
        cfg.apply("lambda_dk", l_dk);
        cfg.apply("lambda_dk1", l_dk1);
        cfg.apply("lambda_pipi", l_pipi);
        cfg.apply("reference", reference);
        cfg.apply("sweep_sizes", sweep_sizes);
        cfg.apply("generator", generator);
        cfg.apply("sizes", sizes_s);
        cfg.apply("trials", trials);
        cfg.apply("eps", jl_eps);

        if (persistence->parsed())
            return cmd_persistence(in, k_max, scales, jobs, out_path);
        if (qtda_cmd->parsed())
            return cmd_qtda(in, k_max, scales, delta, eta, mode, mapping, seed, n_seeds,
                            out_path);
        if (resources->parsed())
            return cmd_resources(make_cost_input(rn, rk, rd, rb, rsk, rsk1, l_dk, l_dk1,
                                                 l_pipi, delta, eta, mapping, memory),
                                 out_path);
        if (compare_cmd->parsed())
            return cmd_compare(make_cost_input(rn, rk, rd, rb, rsk, rsk1, l_dk, l_dk1, l_pipi,
                                               delta, eta, mapping, memory),
                               reference, sweep_sizes, out_path);
        if (gaps_cmd->parsed()) return cmd_gaps(generator, sizes_s, k_max, trials, seed, out_path);
        if (zeno_cmd->parsed()) return cmd_zeno(out_path);
        if (jl_cmd->parsed()) return cmd_jl(in, jl_eps, seed, out_path);
        return 2;
    } catch (const qtda::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qtda::ComputeError& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 3;
    } catch (const qtda::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
