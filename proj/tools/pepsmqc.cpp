// Command-line front end. Every command writes one JSON report.
//
// Exit codes: 0 success, 2 input error, 3 resource cap, 4 verification failure.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "pepsmqc/crossing.hpp"
#include "pepsmqc/errors.hpp"
#include "pepsmqc/honeycomb.hpp"
#include "pepsmqc/json_io.hpp"
#include "pepsmqc/oracle.hpp"
#include "pepsmqc/parent_hamiltonian.hpp"
#include "pepsmqc/pattern.hpp"
#include "pepsmqc/simd/kernels.hpp"

namespace {

using nlohmann::json;
using namespace pepsmqc;

constexpr int kExitInput = 2;
constexpr int kExitCap = 3;
constexpr int kExitVerify = 4;

struct VerificationFailure : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Object id git would assign to the content as a blob.
std::string git_blob_sha1(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-1 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(what + ": " + e.what());
    }
}

struct Report {
    json body = json::object();
    json config = json::object();
    json inputs = json::array();

    void add_input(const std::string& name, const std::string& content) {
        inputs.push_back({{"name", name}, {"git_blob_sha1", git_blob_sha1(content)}, {"bytes", content.size()}});
    }

    void write(const std::string& command, const std::string& path) const {
        json out = {{"schema", "peps-mqc/1"}, {"command", command}, {"config", config}, {"inputs", inputs}};
        out.update(body);
        const std::string text = out.dump(2) + "\n";
        if (path.empty() || path == "-") {
            std::cout << text;
        } else {
            std::ofstream f(path);
            if (!f) {
                throw InputError("cannot write " + path);
            }
            f << text;
        }
    }
};

json branch_json(const BranchResult& b) {
    json j = {{"outcomes", b.outcomes},
              {"frame", b.frame.to_string()},
              {"map_residual", b.map_residual},
              {"phase_error", b.phase_error},
              {"readout", b.readout}};
    if (b.probability) {
        j["probability"] = *b.probability;
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measurement-based computation on a honeycomb PEPS: compiler, simulator and verifiers"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string report_path;
    unsigned threads = 0;
    std::string simd_choice;
    app.add_option("--report,-o", report_path, "Write the JSON report here (default: stdout)");
    app.add_option("--threads", threads, "Worker threads (default: PEPS_MQC_THREADS or 1)");
    app.add_option("--simd", simd_choice, "Kernel set: scalar or avx2 (default: best available)")
        ->check(CLI::IsMember({"scalar", "avx2"}));

    // compile
    auto* compile_cmd = app.add_subcommand("compile", "Compile a circuit JSON into a measurement pattern");
    std::string circuit_path;
    compile_cmd->add_option("circuit", circuit_path, "Circuit JSON")->required();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Walk the outcome branches of a pattern");
    std::string pattern_path;
    bool enumerate = false;
    std::size_t samples = 0;
    std::uint64_t seed = 1;
    std::size_t max_branches = std::size_t{1} << 20;
    bool with_oracle = false;
    bool emit_branches = false;
    int max_sites = 10;
    sim_cmd->add_option("pattern", pattern_path, "Pattern JSON (from compile)")->required();
    auto* enum_flag = sim_cmd->add_flag("--enumerate", enumerate, "Walk every branch (default)");
    sim_cmd->add_option("--sample", samples, "Draw this many branches instead")->excludes(enum_flag);
    sim_cmd->add_option("--seed", seed, "Sampling seed");
    sim_cmd->add_option("--max-branches", max_branches, "Branch cap")->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--oracle", with_oracle, "Take branch probabilities from the state-vector oracle");
    sim_cmd->add_option("--max-sites", max_sites, "Oracle site cap")->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--branches", emit_branches, "List every branch in the report");

    // crossing
    auto* cross_cmd = app.add_subcommand("crossing", "Local unitaries crossing exp(i/2 (a XX + b YY + c ZZ))");
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    std::size_t verify_samples = 0;
    cross_cmd->add_option("--alpha", alpha, "XX parameter in [0, pi)");
    cross_cmd->add_option("--beta", beta, "YY parameter in [0, pi)");
    cross_cmd->add_option("--gamma", gamma, "ZZ parameter in [0, pi)");
    cross_cmd->add_option("--verify", verify_samples, "Schmidt-rank checks per family");
    cross_cmd->add_option("--seed", seed, "Verification seed");

    // hamiltonian
    auto* ham_cmd = app.add_subcommand("hamiltonian", "Parent Hamiltonian checks");
    ham_cmd->require_subcommand(1);
    ham_cmd->fallthrough();
    auto* ham_verify = ham_cmd->add_subcommand("verify", "Hermiticity, PSD and patch annihilation of every term");
    auto* ham_spectrum = ham_cmd->add_subcommand("spectrum", "Lowest levels of the assembled patch Hamiltonian");
    std::string listings_dir;
    std::string patch = "unit7";
    std::size_t eigenvalues = 20;
    for (auto* c : {ham_verify, ham_spectrum}) {
        c->add_option("--listings", listings_dir, "Directory with h_*.txt (default: built-in listings)");
        c->add_option("--patch", patch, "Lattice patch")->check(CLI::IsMember({"unit7"}));
    }
    ham_spectrum->add_option("--eigenvalues", eigenvalues, "Levels to compute")->check(CLI::Range(2, 64));

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "State-vector oracle");
    oracle_cmd->require_subcommand(1);
    oracle_cmd->fallthrough();
    auto* oracle_validate = oracle_cmd->add_subcommand("validate", "Cross-check every branch against the circuit model");
    oracle_validate->add_option("--circuit", circuit_path, "Circuit JSON")->required();
    oracle_validate->add_option("--max-sites", max_sites, "Site cap")->check(CLI::PositiveNumber);

    // dump-model
    auto* dump_cmd = app.add_subcommand("dump-model", "Print the lattice model constants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    Report report;
    report.config["threads"] = threads ? threads : default_thread_count();
    try {
        if (!simd_choice.empty()) {
            simd::set_active(simd_choice == "scalar" ? simd::Isa::scalar : simd::Isa::avx2);
        }
        report.config["simd"] = std::string(simd::isa_name(simd::active().isa));

        if (*compile_cmd) {
            const std::string text = read_file(circuit_path);
            report.add_input(circuit_path, text);
            const auto pattern = compile(circuit_from_json(parse_json(text, circuit_path)));
            report.body["pattern"] = pattern_to_json(pattern);
            report.body["summary"] = {{"columns", pattern.columns},
                                      {"sites", pattern.sites.size()},
                                      {"adaptive_sites", pattern.adaptive_sites()},
                                      {"steps", pattern.steps.size()}};
            report.write("compile", report_path);
        } else if (*sim_cmd) {
            const std::string text = read_file(pattern_path);
            report.add_input(pattern_path, text);
            json pj = parse_json(text, pattern_path);
            if (pj.contains("pattern") && pj.value("command", "") == "compile") {
                pj = pj.at("pattern");  // accept a whole compile report
            }
            const auto pattern = pattern_from_json(pj);
            SimulationOptions opt;
            opt.mode = samples > 0 ? SimulationOptions::Mode::sample : SimulationOptions::Mode::enumerate;
            opt.samples = samples;
            opt.seed = seed;
            opt.max_branches = max_branches;
            opt.threads = threads;
            std::optional<oracle::PatternBackend> backend;
            if (with_oracle) {
                backend.emplace(pattern, max_sites);
                opt.backend = &*backend;
            }
            report.config.update({{"mode", samples > 0 ? "sample" : "enumerate"},
                                  {"samples", samples},
                                  {"seed", seed},
                                  {"max_branches", max_branches},
                                  {"oracle", with_oracle},
                                  {"max_sites", max_sites}});
            const auto sim = simulate_pattern(pattern, opt);
            double max_phase = 0.0;
            for (const auto& b : sim.branches) {
                max_phase = std::max(max_phase, b.phase_error);
            }
            report.body["summary"] = {{"branches", sim.branches.size()},
                                      {"max_map_residual", sim.max_map_residual},
                                      {"max_phase_error", max_phase},
                                      {"circuit_distribution", sim.circuit_distribution}};
            if (with_oracle && opt.mode == SimulationOptions::Mode::enumerate) {
                report.body["summary"]["marginal"] = sim.marginal;
                report.body["summary"]["total_probability"] = sim.total_probability;
            }
            if (emit_branches || opt.mode == SimulationOptions::Mode::sample) {
                report.body["branches"] = json::array();
                for (const auto& b : sim.branches) {
                    report.body["branches"].push_back(branch_json(b));
                }
            }
            report.write("simulate", report_path);
        } else if (*cross_cmd) {
            const crossing::CanonicalGate g{alpha, beta, gamma};
            g.validate();
            report.config.update({{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"verify", verify_samples}, {"seed", seed}});
            const auto sol = crossing::solve_patterns(crossing::filter_matrix(g));
            report.body.update(crossing::solution_to_json(sol));
            bool ok = true;
            if (verify_samples > 0) {
                json v = json::array();
                std::size_t pass = 0;
                std::size_t fail = 0;
                for (const auto& f : sol.families) {
                    const auto r = crossing::verify_family(g, f, verify_samples, seed);
                    v.push_back({{"template", f.template_text}, {"pass", r.passed}, {"fail", r.failed}});
                    pass += r.passed;
                    fail += r.failed;
                }
                report.body["verification"] = {{"pass", pass}, {"fail", fail}, {"families", v}};
                ok = fail == 0;
            }
            report.write("crossing", report_path);
            if (!ok) {
                throw VerificationFailure("crossing: some sampled members do not cross locally");
            }
        } else if (*ham_cmd) {
            const auto listings =
                listings_dir.empty() ? hamiltonian::default_listings() : hamiltonian::load_listings(listings_dir);
            for (const auto& [name, text] : listings) {
                report.add_input(name, text);
            }
            report.config.update({{"patch", patch}, {"listings", listings_dir.empty() ? "built-in" : listings_dir}});
            const auto terms = hamiltonian::unit7_terms(listings);
            bool ok = true;
            if (*ham_verify) {
                json rows = json::array();
                int passed = 0;
                for (const auto& t : terms) {
                    const auto r = hamiltonian::verify_term(t, hamiltonian::patch_support(hamiltonian::geometry_of(t.listing)));
                    rows.push_back({{"term", r.name},
                                    {"sites", t.sites},
                                    {"hermitian", r.hermitian},
                                    {"min_eigenvalue", r.min_eigenvalue},
                                    {"max_eigenvalue", r.max_eigenvalue},
                                    {"annihilation", r.annihilation},
                                    {"kernel_dim", r.kernel_dim},
                                    {"support_rank", r.support_rank},
                                    {"passed", r.passed()}});
                    passed += r.passed() ? 1 : 0;
                }
                const auto mid = hamiltonian::region_support(hamiltonian::RegionKind::vertical_mid_square);
                const auto circ = hamiltonian::region_support(hamiltonian::RegionKind::circle_right_square);
                report.body["terms"] = rows;
                report.body["passed"] = std::to_string(passed) + "/" + std::to_string(terms.size());
                report.body["region_ranks"] = {{"vertical_mid_square", mid.rank}, {"circle_right_square", circ.rank}};
                ok = passed == static_cast<int>(terms.size()) && mid.rank == 4 && circ.rank == 8;
                report.write("hamiltonian verify", report_path);
            } else {
                hamiltonian::PatchOptions opt;
                opt.eigenvalues = eigenvalues;
                report.config["eigenvalues"] = eigenvalues;
                report.config["boundary"] = "<0| left, |0> right";
                const auto r = hamiltonian::assemble_and_diagonalize(terms, opt);
                report.body = {{"dimension", r.dimension},
                               {"nonzeros", r.nonzeros},
                               {"eigenvalues", r.eigenvalues},
                               {"lowest", {r.eigenvalues[0], r.eigenvalues[1]}},
                               {"degeneracy", r.degeneracy},
                               {"gap", r.gap ? json(*r.gap) : json(nullptr)},
                               {"peps_residual", r.peps_residual},
                               {"ground_overlap", r.ground_overlap},
                               {"matvecs", r.matvecs}};
                ok = std::abs(r.eigenvalues[0]) <= 1e-8 && r.peps_residual <= 1e-8 &&
                     std::abs(r.ground_overlap - 1.0) <= 1e-6;
                report.write("hamiltonian spectrum", report_path);
            }
            if (!ok) {
                throw VerificationFailure("hamiltonian: verification failed");
            }
        } else if (*oracle_cmd) {
            const std::string text = read_file(circuit_path);
            report.add_input(circuit_path, text);
            oracle::CrossValidationOptions opt;
            opt.max_sites = max_sites;
            opt.threads = threads;
            report.config.update({{"max_sites", max_sites}, {"tolerance", opt.tolerance}});
            const auto r = oracle::cross_validate(circuit_from_json(parse_json(text, circuit_path)), opt);
            report.body = oracle::report_to_json(r);
            report.write("oracle validate", report_path);
            if (!r.passed) {
                throw VerificationFailure("oracle: cross-validation failed");
            }
        } else if (*dump_cmd) {
            report.body["model"] = json::parse(honeycomb::dump_constants());
            report.write("dump-model", report_path);
        }
    } catch (const ResourceCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return kExitVerify;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerify;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
