#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bundles.hpp"

using namespace symmap;
using namespace symmap::tool;

namespace {

constexpr const char* tool_version = "0.1.0";

struct Globals {
    std::uint64_t seed = default_seed;
    std::string out;
    std::optional<double> tol;
    std::string format;
    mutable std::vector<std::string> outputs; // files written under --out
};

/// Scans are CSV unless --format json, which turns rows into objects.
std::string scan_output(const Globals& g, const std::string& csv) {
    if (g.format != "json") return csv;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    for (std::stringstream h(line); std::getline(h, line, ',');) header.push_back(line);
    json rows = json::array();
    while (std::getline(in, line)) {
        json row = json::object();
        std::stringstream cells(line);
        std::string cell;
        for (std::size_t i = 0; std::getline(cells, cell, ',') && i < header.size(); ++i) row[header[i]] = std::stod(cell);
        rows.push_back(row);
    }
    return rows.dump(2) + "\n";
}

Tolerances tolerances(const Globals& g) {
    Tolerances t = default_tolerances();
    if (g.tol) {
        if (!(*g.tol > 0)) throw ContractError("--tol must be > 0");
        t.psd = t.verdict = t.positivity = *g.tol;
    }
    return t;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<double> parse_numbers(std::string_view text) {
    std::vector<double> v;
    std::stringstream in{std::string(text)};
    for (std::string item; std::getline(in, item, ',');) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != item.size()) throw ContractError("bad number '" + item + "'");
        v.push_back(x);
    }
    return v;
}

/// builtin:state18:q1,q2,q3,q4 | builtin:rho1|rho2|rho3 | path to matrix JSON.
BipartiteDensityMatrix load_state(const std::string& arg, const Tolerances& tol) {
    if (arg.starts_with("builtin:state18:")) {
        const auto q = parse_numbers(std::string_view(arg).substr(16));
        if (q.size() != 4) throw ContractError("state18 needs four q values");
        return build_state_18({q[0], q[1], q[2], q[3]});
    }
    if (arg.starts_with("builtin:")) return builtin_state(parse_builtin_state(std::string_view(arg).substr(8)));
    return BipartiteDensityMatrix::square(parse_matrix_json(read_file(arg)), tol);
}

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << "\n"; }

/// Writes to --out/<name> when --out is set, otherwise to stdout.
void emit(const Globals& g, const std::string& name, const std::string& content) {
    if (g.out.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::create_directories(g.out);
    const auto path = (std::filesystem::path(g.out) / name).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ContractError("cannot write '" + path + "'");
    os << content;
    g.outputs.push_back(name);
}

void emit_manifest(const Globals& g, const std::string& command, const json& config) {
    if (g.out.empty()) return;
    const json m{{"command", command}, {"config", config}, {"outputs", g.outputs}, {"seed", g.seed},
                 {"tool_version", tool_version}};
    std::ofstream(std::filesystem::path(g.out) / "manifest.json", std::ios::binary) << m.dump(2) << "\n";
}

struct SpecArgs {
    std::string spec_file;
    std::string basis = "d4_5x4";
    std::size_t L = 0;
    double z = 1.0;
    std::string rotations = "identity";
    std::optional<double> t;

    void add(CLI::App* c) {
        c->add_option("--spec", spec_file, "Map spec JSON file (overrides the flags below)");
        c->add_option("--basis", basis, "Basis id");
        c->add_option("--L", L, "Number of groups entering with a minus sign");
        c->add_option("--z", z, "Mixing parameter in [-1,1]");
        c->add_option("--rotations", rotations, "Rotation id, or comma list with one id per group");
        c->add_option("--t", t, "POVM scale (default: t_opt)");
    }

    MapSpec build(const Tolerances& tol) const {
        if (!spec_file.empty()) {
            try {
                return spec_from_json(json::parse(read_file(spec_file)), tol);
            } catch (const json::parse_error& e) {
                throw ContractError(std::string("spec file: ") + e.what());
            }
        }
        json j{{"basis", basis}, {"L", L}, {"z", z}, {"rotations", rotations}};
        if (t) j["t"] = *t;
        return spec_from_json(j, tol);
    }
};

int run_reproduce(const Globals& g, const std::string& target) {
    const auto tol = tolerances(g);
    std::vector<Bundle> bundles;
    if (target == "appendixC") bundles.push_back(reproduce_appendix_c(tol));
    else if (target == "example1") bundles.push_back(reproduce_example1(tol));
    else if (target == "fig1") bundles.push_back(reproduce_fig1(tol));
    else if (target == "fig2") bundles.push_back(reproduce_fig2());
    else {
        for (const auto& e : example_setups())
            if (target == e.name) bundles.push_back(reproduce_example(e, g.seed, tol));
    }
    if (bundles.empty()) throw ContractError("unknown reproduce target '" + target + "'");
    std::vector<std::string> failures;
    for (const auto& b : bundles) {
        emit(g, b.filename, b.content);
        failures.insert(failures.end(), b.failures.begin(), b.failures.end());
    }
    if (!failures.empty()) {
        write_json(std::cerr, {{"error", "certification"}, {"failures", failures}});
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symmetric-measurement positive maps: separability tests, witnesses and concurrence bounds"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Seed for Haar sampling")->capture_default_str();
    app.add_option("--out", g.out, "Output directory (default: stdout)");
    app.add_option("--tol", g.tol, "Override the PSD / verdict / positivity tolerance");
    app.add_option("--format", g.format, "Scan output format (default csv)")->check(CLI::IsMember({"json", "csv"}));
    app.fallthrough();

    std::function<int()> action;

    // basis
    auto* basis_cmd = app.add_subcommand("basis", "Operator bases")->require_subcommand(1);
    std::string basis_id = "d4_5x4";
    auto* basis_export = basis_cmd->add_subcommand("export", "Write a basis as JSON");
    basis_export->add_option("--basis", basis_id, "Basis id")->capture_default_str();
    basis_export->callback([&] {
        action = [&] {
            emit(g, basis_id + ".json", basis_to_json(basis_by_id(basis_id)).dump(2) + "\n");
            return 0;
        };
    });

    // povm
    auto* povm_cmd = app.add_subcommand("povm", "(N,M)-POVMs")->require_subcommand(1);
    std::optional<double> povm_t;
    for (const char* name : {"verify", "export"}) {
        auto* sub = povm_cmd->add_subcommand(name, std::string(name) == "verify" ? "Certify the symmetry identities"
                                                                                 : "Write the POVM as JSON");
        sub->add_option("--basis", basis_id, "Basis id")->capture_default_str();
        sub->add_option("--t", povm_t, "Scale (default: t_opt)");
        const bool verify = std::string(name) == "verify";
        sub->callback([&, verify] {
            action = [&, verify] {
                const auto tol = tolerances(g);
                const auto basis = basis_by_id(basis_id);
                const auto topt = find_t_opt(basis, tol);
                const auto p = build_povm(basis, povm_t.value_or(topt.t), tol);
                if (!verify) {
                    emit(g, "povm_" + basis_id + ".json", povm_to_json(p).dump(2) + "\n");
                    return 0;
                }
                const auto r = certify_symmetry(p, tol);
                json j = symmetry_report_to_json(r);
                j["basis"] = basis_id;
                j["t"] = p.t();
                j["x"] = p.x();
                j["t_opt"] = topt.t;
                j["x_opt"] = topt.x;
                j["gram_rank"] = povm_gram_rank(p, tol);
                emit(g, "povm_verify_" + basis_id + ".json", j.dump(2) + "\n");
                return r.passed ? 0 : 1;
            };
        });
    }

    // map apply
    auto* map_cmd = app.add_subcommand("map", "Positive maps")->require_subcommand(1);
    SpecArgs map_args;
    std::string state_arg;
    auto* map_apply = map_cmd->add_subcommand("apply", "Apply Phi_z (or I (x) Phi_z) to a matrix file");
    map_args.add(map_apply);
    map_apply->add_option("--state", state_arg, "Matrix JSON file")->required();
    map_apply->callback([&] {
        action = [&] {
            const auto tol = tolerances(g);
            const auto spec = map_args.build(tol);
            const auto x = parse_matrix_json(read_file(state_arg));
            const std::size_t d = spec.dim();
            ComplexMatrix y;
            if (x.rows() == d && x.cols() == d) y = spec.phi_z(x);
            else if (x.rows() % d == 0 && x.is_square()) y = apply_extended_map(spec, x, x.rows() / d);
            else throw DimensionError("map apply: input size incompatible with d=" + std::to_string(d));
            emit(g, "map_output.json", matrix_to_json(y).dump(2) + "\n");
            return 0;
        };
    });

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "Entanglement test with (I (x) Phi_z)");
    SpecArgs detect_args;
    std::string scan_grid;
    detect_args.add(detect_cmd);
    detect_cmd->add_option("--state", state_arg, "builtin:state18:q1,q2,q3,q4 | builtin:rhoN | matrix JSON file");
    detect_cmd->add_option("--scan", scan_grid,
                           "Scan state18 with q2=q3=q4 over q1=lo:hi:step,z=lo:hi:step (catalog spec 'state18')");
    detect_cmd->callback([&] {
        action = [&] {
            const auto tol = tolerances(g);
            if (!scan_grid.empty()) {
                const auto [q1r, zr] = parse_grid(scan_grid);
                emit(g, g.format == "json" ? "detect_scan.json" : "detect_scan.csv",
                     scan_output(g, scan_detect_csv("state18", q1r, zr, tol)));
                return 0;
            }
            if (state_arg.empty()) throw ContractError("detect: --state or --scan required");
            const auto spec = detect_args.build(tol);
            const auto r = detect(spec, load_state(state_arg, tol), tol);
            emit(g, "detect.json", detection_report_to_json(r).dump(2) + "\n");
            return 0;
        };
    });

    // witness
    auto* witness_cmd = app.add_subcommand("witness", "Entanglement witnesses")->require_subcommand(1);
    SpecArgs witness_args;
    std::string form = "choi";
    auto* w_build = witness_cmd->add_subcommand("build", "Construct a witness from a map spec");
    witness_args.add(w_build);
    w_build->add_option("--form", form, "choi | rescaled | normalized")
        ->check(CLI::IsMember({"choi", "rescaled", "normalized"}))
        ->capture_default_str();
    w_build->callback([&] {
        action = [&] {
            const auto spec = witness_args.build(tolerances(g));
            const auto w = form == "choi" ? choi_witness(spec)
                                          : form == "rescaled" ? rescaled_witness(spec) : normalized_witness(spec);
            emit(g, "witness.json", matrix_to_json(w.matrix).dump(2) + "\n");
            return 0;
        };
    });
    std::string witness_file;
    auto* w_expect = witness_cmd->add_subcommand("expect", "Tr(W rho)");
    w_expect->add_option("--witness", witness_file, "Matrix JSON file")->required();
    w_expect->add_option("--state", state_arg, "builtin:rhoN | builtin:state18:... | matrix JSON file")->required();
    w_expect->callback([&] {
        action = [&] {
            const auto tol = tolerances(g);
            const auto w = parse_matrix_json(read_file(witness_file));
            const auto rho = load_state(state_arg, tol);
            emit(g, "expectation.txt", fmt17(expectation(w, rho.matrix(), tol)) + "\n");
            return 0;
        };
    });
    auto* w_ppt = witness_cmd->add_subcommand("ppt", "Partial-transpose test");
    w_ppt->add_option("--state", state_arg, "builtin:rhoN | builtin:state18:... | matrix JSON file")->required();
    w_ppt->callback([&] {
        action = [&] {
            const auto tol = tolerances(g);
            const auto r = ppt_check(load_state(state_arg, tol), tol);
            emit(g, "ppt.json", json{{"ppt", r.ppt}, {"min_eigenvalue", r.min_eigenvalue}}.dump(2) + "\n");
            return 0;
        };
    });

    // bound
    auto* bound_cmd = app.add_subcommand("bound", "Concurrence lower bound");
    double bound_z = 1.0;
    bound_cmd->add_option("--state", state_arg, "builtin:state18:... | builtin:rhoN | matrix JSON file")->required();
    bound_cmd->add_option("--z", bound_z, "Mixing parameter in [-1,1]")->capture_default_str();
    bound_cmd->callback([&] {
        action = [&] {
            const auto tol = tolerances(g);
            auto r = lower_bound_theorem2(load_state(state_arg, tol), bound_z, tol);
            if (state_arg.starts_with("builtin:state18:")) {
                const auto q = parse_numbers(std::string_view(state_arg).substr(16));
                r.comparison_value = baseline_bound_ref30(q[0], q[3]);
            }
            emit(g, "bound.json", bound_report_to_json(r).dump(2) + "\n");
            return 0;
        };
    });

    // scan bounds
    auto* scan_cmd = app.add_subcommand("scan", "Parameter scans")->require_subcommand(1);
    std::string grid = "q1=0:1:0.01,z=-1:1:0.01";
    auto* scan_bounds = scan_cmd->add_subcommand("bounds", "Bound grid on state18 with q2=q3=q4");
    scan_bounds->add_option("--grid", grid, "q1=lo:hi:step,z=lo:hi:step")->capture_default_str();
    scan_bounds->callback([&] {
        action = [&] {
            const auto [q1r, zr] = parse_grid(grid);
            emit(g, g.format == "json" ? "bounds.json" : "bounds.csv",
                 scan_output(g, scan_bounds_csv(q1r, zr, true, tolerances(g))));
            return 0;
        };
    });

    // reproduce
    auto* repro = app.add_subcommand("reproduce", "Regenerate a worked example or figure grid");
    std::string target;
    repro->add_option("target", target, "appendixC | example1..example4 | fig1 | fig2")
        ->required()
        ->check(CLI::IsMember({"appendixC", "example1", "example2", "example3", "example4", "fig1", "fig2"}));
    repro->callback([&] { action = [&] { return run_reproduce(g, target); }; });

    // validate
    auto* validate = app.add_subcommand("validate", "Run every shipped certification");
    std::string fixture_dir;
    validate->add_option("--fixtures", fixture_dir, "Directory with <example>_printed.json fixture files");
    validate->callback([&] {
        action = [&] {
            const auto checks = run_validation(g.seed, fixture_dir, tolerances(g));
            emit(g, "validate.json", checks_to_json(checks).dump(2) + "\n");
            for (const auto& c : checks)
                if (c.counted && !c.passed) {
                    write_json(std::cerr, {{"error", "certification"}, {"failed", c.name}});
                    return 1;
                }
            return 0;
        };
    });

    // fixtures export
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Printed example witnesses")->require_subcommand(1);
    auto* fx_export = fixtures_cmd->add_subcommand("export", "Write the compiled-in fixtures as JSON files");
    fx_export->callback([&] {
        action = [&] {
            for (const auto& e : example_setups()) {
                const std::string name = std::string(e.name) + "_printed";
                emit(g, name + ".json", fixture_to_json(name, e.fixture).dump(2) + "\n");
            }
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string command;
    for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
        a = a->get_subcommands().front();
        command += (command.empty() ? "" : " ") + a->get_name();
    }
    // the output directory is left out so that manifests compare equal across runs
    json args = json::array();
    for (int i = 1; i < argc; ++i) {
        const std::string_view a = argv[i];
        if (a == "--out") ++i;
        else if (!a.starts_with("--out=")) args.push_back(a);
    }

    try {
        if (!action) return 2;
        const int code = action();
        emit_manifest(g, command, {{"args", args}});
        return code;
    } catch (const CertificationError& e) {
        write_json(std::cerr, {{"error", "certification"}, {"message", e.what()}});
        return 1;
    } catch (const NumericError& e) {
        write_json(std::cerr, {{"error", "numeric"}, {"message", e.what()}, {"residual", e.residual()}});
        return 3;
    } catch (const Error& e) {
        write_json(std::cerr, {{"error", "usage"}, {"message", e.what()}});
        return 2;
    } catch (const std::exception& e) {
        write_json(std::cerr, {{"error", "internal"}, {"message", e.what()}});
        return 1;
    }
}
