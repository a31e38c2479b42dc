#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "parity_qaoa/parity_qaoa.hpp"

namespace pq = parity_qaoa;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_validation = 2;
constexpr int exit_resource = 3;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw pq::ValidationError(path + ": cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw std::runtime_error(path + ": cannot write file");
    }
}

std::string sha256_hex(const std::string &data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; i++) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct SourceConfig {
    int complete = 0;
    std::string layout;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SourceConfig, complete, layout)

struct PartitionConfig {
    std::string partition = "three-body";
    int l_max = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PartitionConfig, partition, l_max)

struct CompileConfig {
    SourceConfig source;
    PartitionConfig partition;
    std::string out = "layout";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CompileConfig, source, partition, out)

struct SynthConfig {
    SourceConfig source;
    PartitionConfig partition;
    std::string partition_file;
    std::string out = "drivers.json";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SynthConfig, source, partition, partition_file, out)

struct CircuitConfig {
    SourceConfig source;
    PartitionConfig partition;
    std::size_t p = 1;
    std::vector<double> params;
    uint64_t seed = 0;
    double strength = 1.0;
    std::string out = "circuit.txt";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CircuitConfig, source, partition, p, params, seed, strength, out)

struct DepthScanConfig {
    std::vector<int> complete{6};
    bool sweep = false;
    std::string out = "depth_scan.csv";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DepthScanConfig, complete, sweep, out)

struct QaoaCmdConfig {
    int complete = 6;
    std::vector<std::string> modes{"implicit", "hybrid", "explicit"};
    std::size_t instances = 96;
    std::size_t p = 3;
    std::size_t restarts = 100;
    std::vector<double> noise{0.0};
    std::size_t trajectories = 500;
    double single_qubit_error = 1e-3;
    double strength = 1.0;
    uint64_t seed = 0;
    std::string out = "qaoa.csv";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(QaoaCmdConfig, complete, modes, instances, p, restarts, noise,
                                                trajectories, single_qubit_error, strength, seed, out)

struct Outcome {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

pq::ParityLayout load_source(const SourceConfig &src, Outcome &outcome) {
    if (src.complete > 0) {
        return pq::generate_complete_layout(src.complete);
    }
    if (src.layout.empty()) {
        throw pq::InvalidArgument("one of --complete or --layout is required");
    }
    std::string text = read_file(src.layout);
    outcome.inputs.push_back(src.layout);
    try {
        return pq::load_layout(text);
    } catch (const pq::ValidationError &e) {
        throw pq::ValidationError(src.layout + ": " + e.what());
    }
}

pq::ConstraintPartition make_partition(const pq::ParityLayout &layout, const PartitionConfig &cfg) {
    pq::ConstraintPartition base = [&] {
        if (cfg.partition == "explicit") {
            return pq::partition_all_explicit(layout);
        }
        if (cfg.partition == "implicit") {
            return pq::partition_all_implicit(layout);
        }
        if (cfg.partition == "three-body") {
            return pq::partition_three_body_explicit(layout);
        }
        throw pq::InvalidArgument("unknown partition strategy '" + cfg.partition +
                                  "' (expected explicit, implicit or three-body)");
    }();
    if (cfg.l_max > 0) {
        return pq::modularize(layout, cfg.l_max, base);
    }
    return base;
}

pq::Mode mode_of(const pq::ConstraintPartition &partition) {
    if (partition.n_explicit() == 0) {
        return pq::Mode::implicit;
    }
    return partition.implicit_ids().empty() ? pq::Mode::explicit_ : pq::Mode::hybrid;
}

Outcome run_compile(const CompileConfig &cfg) {
    Outcome outcome;
    auto layout = load_source(cfg.source, outcome);
    auto partition = make_partition(layout, cfg.partition);
    std::string layout_path = cfg.out + ".layout.json", partition_path = cfg.out + ".partition.json";
    write_file(layout_path, pq::serialize_layout(layout));
    write_file(partition_path, pq::serialize_partition(partition));
    outcome.outputs = {layout_path, partition_path};
    std::size_t modules = partition.modules().empty() ? 1 : partition.modules().size();
    std::cout << "K=" << layout.qubit_count() << " n_C=" << partition.n_explicit() << " n_C_tot=" << partition.n_total()
              << " n_r=" << num(partition.ratio()) << " modules=" << modules << "\n";
    return outcome;
}

Outcome run_synth(const SynthConfig &cfg) {
    Outcome outcome;
    auto layout = load_source(cfg.source, outcome);
    pq::ConstraintPartition partition = [&] {
        if (cfg.partition_file.empty()) {
            return make_partition(layout, cfg.partition);
        }
        outcome.inputs.push_back(cfg.partition_file);
        try {
            return pq::load_partition(read_file(cfg.partition_file), layout);
        } catch (const pq::ValidationError &e) {
            throw pq::ValidationError(cfg.partition_file + ": " + e.what());
        }
    }();
    auto drivers = pq::assign_priorities(pq::synthesize_driver_set(layout, partition));
    auto report = pq::validate_driver_set(drivers, layout, partition);
    write_file(cfg.out, pq::serialize_driver_set(drivers));
    outcome.outputs = {cfg.out};
    std::size_t longest = 0;
    for (const auto &line : drivers.lines) {
        longest = std::max(longest, line.length());
    }
    std::cout << "lines=" << drivers.lines.size() << " expected=" << report.expected_cardinality
              << " longest=" << longest << " valid=" << (report.passed() ? "yes" : "no")
              << " driver_depth=" << pq::driver_stage_depth(layout, drivers) << "\n";
    if (!report.passed()) {
        throw pq::ValidationError("synthesized driver set failed validation");
    }
    return outcome;
}

Outcome run_circuit(const CircuitConfig &cfg) {
    Outcome outcome;
    auto layout = load_source(cfg.source, outcome);
    auto partition = make_partition(layout, cfg.partition);
    auto drivers = pq::assign_priorities(pq::synthesize_driver_set(layout, partition));
    auto spec = pq::build_hamiltonians(layout, cfg.strength);
    std::size_t n = pq::params_per_cycle(partition) * cfg.p;
    std::vector<double> params = cfg.params;
    if (params.empty()) {
        pq::Rng rng(cfg.seed);
        params.resize(n);
        for (auto &v : params) {
            v = rng.uniform(0, 2 * std::numbers::pi);
        }
    } else if (params.size() != n) {
        throw pq::InvalidArgument("expected " + std::to_string(n) + " parameters, got " +
                                  std::to_string(params.size()));
    }
    auto circuit = pq::qaoa_circuit(mode_of(partition), layout, partition, drivers, spec,
                                    pq::unpack_params(params, partition));
    write_file(cfg.out, pq::export_circuit(circuit));
    outcome.outputs = {cfg.out};
    std::size_t cnots = circuit.count(pq::GateKind::CNOT);
    std::cout << "mode=" << pq::to_string(mode_of(partition)) << " gates=" << circuit.size() << " cnot=" << cnots
              << " depth=" << pq::schedule(circuit) << "\n";
    return outcome;
}

Outcome run_depth_scan(const DepthScanConfig &cfg) {
    Outcome outcome;
    std::string csv = "N,n_r,depth,marker\n";
    for (int n : cfg.complete) {
        for (const auto &p : pq::depth_scan(n, cfg.sweep)) {
            csv += std::to_string(p.n_spins) + "," + num(p.n_r) + "," + std::to_string(p.depth) + "," +
                   (p.marker ? "1" : "0") + "\n";
        }
    }
    write_file(cfg.out, csv);
    std::cout << csv;
    outcome.outputs = {cfg.out};
    return outcome;
}

Outcome run_qaoa(const QaoaCmdConfig &cfg) {
    Outcome outcome;
    pq::EnsembleConfig ec;
    ec.n_spins = cfg.complete;
    ec.modes.clear();
    for (const auto &m : cfg.modes) {
        ec.modes.push_back(pq::parse_mode(m));
    }
    ec.instances = cfg.instances;
    ec.qaoa.p = cfg.p;
    ec.qaoa.restarts = cfg.restarts;
    ec.noise_rates = cfg.noise;
    ec.trajectories = cfg.trajectories;
    ec.single_qubit_error_rate = cfg.single_qubit_error;
    ec.constraint_strength = cfg.strength;
    ec.seed = cfg.seed;
    ec.threads = pq::default_thread_count();
    auto result = pq::ensemble_experiment(ec);
    std::string csv = pq::results_csv(result.rows);
    write_file(cfg.out, csv);
    std::cout << csv;
    outcome.outputs = {cfg.out};
    return outcome;
}

json digests(const std::vector<std::string> &paths) {
    json out = json::array();
    for (const auto &p : paths) {
        out.push_back({{"path", p}, {"sha256", sha256_hex(read_file(p))}});
    }
    return out;
}

void write_manifest(const std::string &path, const std::string &command, const json &config, uint64_t seed,
                    const Outcome &outcome) {
    json m = {{"command", command},
              {"config", config},
              {"seed", seed},
              {"version", pq::version},
              {"inputs", digests(outcome.inputs)},
              {"outputs", digests(outcome.outputs)}};
    write_file(path, m.dump(2) + "\n");
}

template <class Config, class Run>
void run_with_manifest(const std::string &command, const Config &cfg, uint64_t seed, const std::string &manifest,
                       Run run) {
    Outcome outcome = run(cfg);
    write_manifest(manifest, command, json(cfg), seed, outcome);
    std::cerr << "manifest: " << manifest << "\n";
}

/// Re-runs a manifest's command with outputs suffixed ".replay" and compares digests.
int run_replay(const std::string &manifest_path) {
    json m;
    try {
        m = json::parse(read_file(manifest_path));
    } catch (const json::exception &e) {
        throw pq::ValidationError(manifest_path + ": " + e.what());
    }
    std::string command = m.at("command").get<std::string>();
    const json &config = m.at("config");
    for (const auto &in : m.at("inputs")) {
        if (sha256_hex(read_file(in.at("path").get<std::string>())) != in.at("sha256").get<std::string>()) {
            throw pq::ValidationError("input " + in.at("path").get<std::string>() + " changed since the run");
        }
    }
    Outcome outcome;
    if (command == "compile") {
        auto cfg = config.get<CompileConfig>();
        cfg.out += ".replay";
        outcome = run_compile(cfg);
    } else if (command == "synth") {
        auto cfg = config.get<SynthConfig>();
        cfg.out += ".replay";
        outcome = run_synth(cfg);
    } else if (command == "circuit") {
        auto cfg = config.get<CircuitConfig>();
        cfg.out += ".replay";
        outcome = run_circuit(cfg);
    } else if (command == "depth-scan") {
        auto cfg = config.get<DepthScanConfig>();
        cfg.out += ".replay";
        outcome = run_depth_scan(cfg);
    } else if (command == "qaoa") {
        auto cfg = config.get<QaoaCmdConfig>();
        cfg.out += ".replay";
        outcome = run_qaoa(cfg);
    } else {
        throw pq::ValidationError(manifest_path + ": unknown command '" + command + "'");
    }
    const json &expected = m.at("outputs");
    if (expected.size() != outcome.outputs.size()) {
        throw pq::ValidationError("replay produced a different number of outputs");
    }
    bool identical = true;
    for (std::size_t i = 0; i < outcome.outputs.size(); i++) {
        bool same = sha256_hex(read_file(outcome.outputs[i])) == expected[i].at("sha256").get<std::string>();
        std::cerr << (same ? "identical: " : "DIFFERS: ") << expected[i].at("path").get<std::string>() << " vs "
                  << outcome.outputs[i] << "\n";
        identical &= same;
    }
    return identical ? exit_ok : exit_validation;
}

void add_source(CLI::App *cmd, SourceConfig &src) {
    auto *c = cmd->add_option("--complete", src.complete, "Complete graph on N spins")->check(CLI::Range(2, 1000));
    auto *l = cmd->add_option("--layout", src.layout, "Layout document (JSON)");
    c->excludes(l);
    l->excludes(c);
}

void add_partition(CLI::App *cmd, PartitionConfig &part) {
    cmd->add_option("--partition", part.partition, "Strategy: explicit, implicit or three-body")
        ->check(CLI::IsMember({"explicit", "implicit", "three-body"}));
    cmd->add_option("--l-max", part.l_max, "Module side length (modularize the partition)")->check(CLI::Range(2, 1000));
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Parity-architecture QAOA compiler and simulator"};
    app.set_version_flag("--version", std::string(pq::version));
    app.require_subcommand(1);

    CompileConfig compile_cfg;
    auto *compile = app.add_subcommand("compile", "Build a layout and constraint partition");
    add_source(compile, compile_cfg.source);
    add_partition(compile, compile_cfg.partition);
    compile->add_option("--out", compile_cfg.out, "Output prefix");

    SynthConfig synth_cfg;
    auto *synth = app.add_subcommand("synth", "Synthesize and validate a driver set");
    add_source(synth, synth_cfg.source);
    add_partition(synth, synth_cfg.partition);
    synth->add_option("--partition-file", synth_cfg.partition_file, "Partition document (JSON)");
    synth->add_option("--out", synth_cfg.out, "Driver set output (JSON)");

    CircuitConfig circuit_cfg;
    auto *circuit = app.add_subcommand("circuit", "Emit the QAOA circuit as gate text");
    add_source(circuit, circuit_cfg.source);
    add_partition(circuit, circuit_cfg.partition);
    circuit->add_option("--p", circuit_cfg.p, "QAOA cycles")->check(CLI::PositiveNumber);
    circuit->add_option("--params", circuit_cfg.params, "Flat parameters [omega,] gamma, beta per cycle")
        ->delimiter(',');
    circuit->add_option("--seed", circuit_cfg.seed, "Seed for random parameters when --params is absent");
    circuit->add_option("--strength", circuit_cfg.strength, "Constraint strength c")->check(CLI::PositiveNumber);
    circuit->add_option("--out", circuit_cfg.out, "Circuit output (text)");

    DepthScanConfig scan_cfg;
    auto *scan = app.add_subcommand("depth-scan", "Cycle depth versus fraction of explicit constraints");
    scan->add_option("--complete", scan_cfg.complete, "Comma-separated N values")
        ->delimiter(',')
        ->check(CLI::Range(3, 1000));
    scan->add_flag("--sweep", scan_cfg.sweep, "Include intermediate three-body and modularized points");
    scan->add_option("--out", scan_cfg.out, "CSV output");

    QaoaCmdConfig qaoa_cfg;
    auto *qaoa = app.add_subcommand("qaoa", "Ensemble QAOA experiment with optional CNOT noise sweep");
    qaoa->add_option("--complete", qaoa_cfg.complete, "Complete graph on N spins")->check(CLI::Range(3, 1000));
    qaoa->add_option("--modes", qaoa_cfg.modes, "Comma-separated modes")
        ->delimiter(',')
        ->check(CLI::IsMember({"explicit", "implicit", "hybrid"}));
    qaoa->add_option("--instances", qaoa_cfg.instances, "Random instances")->check(CLI::PositiveNumber);
    qaoa->add_option("--p", qaoa_cfg.p, "QAOA cycles")->check(CLI::PositiveNumber);
    qaoa->add_option("--restarts", qaoa_cfg.restarts, "Random restarts per instance")->check(CLI::PositiveNumber);
    qaoa->add_option("--noise", qaoa_cfg.noise, "Comma-separated CNOT error rates")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    qaoa->add_option("--trajectories", qaoa_cfg.trajectories, "Noise trajectories")->check(CLI::PositiveNumber);
    qaoa->add_option("--single-qubit-error", qaoa_cfg.single_qubit_error, "Single-qubit gate error rate")
        ->check(CLI::Range(0.0, 1.0));
    qaoa->add_option("--strength", qaoa_cfg.strength, "Constraint strength c")->check(CLI::PositiveNumber);
    qaoa->add_option("--seed", qaoa_cfg.seed, "Experiment seed");
    qaoa->add_option("--out", qaoa_cfg.out, "Results CSV");

    std::string manifest_path;
    auto *replay = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
    replay->add_option("--manifest", manifest_path, "Manifest file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (*compile) {
            run_with_manifest("compile", compile_cfg, 0, compile_cfg.out + ".manifest.json", run_compile);
        } else if (*synth) {
            run_with_manifest("synth", synth_cfg, 0, synth_cfg.out + ".manifest.json", run_synth);
        } else if (*circuit) {
            run_with_manifest("circuit", circuit_cfg, circuit_cfg.seed, circuit_cfg.out + ".manifest.json",
                              run_circuit);
        } else if (*scan) {
            run_with_manifest("depth-scan", scan_cfg, 0, scan_cfg.out + ".manifest.json", run_depth_scan);
        } else if (*qaoa) {
            run_with_manifest("qaoa", qaoa_cfg, qaoa_cfg.seed, qaoa_cfg.out + ".manifest.json", run_qaoa);
        } else if (*replay) {
            return run_replay(manifest_path);
        }
    } catch (const pq::ResourceLimitError &e) {
        std::cerr << "resource limit: " << e.what()
                  << " (dense simulation is limited; use depth-scan for larger layouts)\n";
        return exit_resource;
    } catch (const pq::ValidationError &e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const pq::InvalidArgument &e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return exit_validation;
    } catch (const pq::SynthesisFailure &e) {
        std::cerr << "driver synthesis failed: " << e.what()
                  << " (enforce more constraints explicitly, e.g. a smaller --l-max)\n";
        return exit_validation;
    } catch (const pq::PrioritizationFailure &e) {
        std::cerr << "prioritization failed: " << e.what() << "\n";
        return exit_validation;
    } catch (const pq::DegenerateSpectrum &e) {
        std::cerr << "degenerate spectrum: " << e.what() << "\n";
        return exit_validation;
    } catch (const json::exception &e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_ok;
}
