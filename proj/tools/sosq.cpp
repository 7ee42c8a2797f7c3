// sosq: verification runs, component tables and spectra from a JSON config.

#include <sosq/suite.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace sosq;

int write_output(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return kExitPass;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "sosq: cannot write " << path << "\n";
        return kExitConfig;
    }
    out << text;
    return kExitPass;
}

template <class Body>
int guarded(Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "sosq: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PoleDominatedRun& e) {
        std::cerr << "sosq: pole-dominated run: " << e.what() << "\n  digest: " << e.digest << "\n";
        return kExitPole;
    } catch (const PoleError& e) {
        std::cerr << "sosq: pole-dominated run: " << e.what() << "\n";
        return kExitPole;
    } catch (const std::invalid_argument& e) {
        std::cerr << "sosq: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical certificates for level-1 qKZB solutions of the SOS model"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    std::vector<std::string> suites;
    std::optional<std::uint64_t> seed;
    bool timing = false;

    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--config", config_path, "JSON run configuration")->required();
    verify->add_option("--suite", suites, "suite name, repeatable");
    verify->add_option("--seed", seed, "override the random seed");
    verify->add_option("--out", out_path, "report path (default stdout)");
    verify->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    verify->add_flag("--timing", timing, "include wall time in the report");

    auto* components = app.add_subcommand("components", "print solution components");
    components->add_option("--config", config_path, "JSON run configuration")->required();
    components->add_option("--out", out_path, "output path (default stdout)");
    components->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* spectrum = app.add_subcommand("spectrum", "Hamiltonian spectrum at the homogeneous combinatorial point");
    spectrum->add_option("--config", config_path, "JSON run configuration")->required();
    spectrum->add_option("--out", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitPass : kExitConfig;
    }

    auto load = [&] {
        RunConfig cfg = load_config(config_path);
        if (!suites.empty()) cfg.suites = suites;
        if (seed) cfg.seed = *seed;
        if (!format.empty()) cfg.format = format;
        if (!out_path.empty()) cfg.output = out_path;
        validate_config(cfg);
        return cfg;
    };

    if (*verify) {
        return guarded([&] {
            const RunConfig cfg = load();
            SuiteReport rep = run_verify(cfg);
            rep.include_wall_time = timing;
            const std::string text = cfg.format == "csv" ? report_to_csv(rep) : report_to_json(rep).dump(2) + "\n";
            if (int rc = write_output(cfg.output, text); rc != kExitPass) return rc;
            std::cerr << (rep.passed() ? "PASS" : "FAIL") << ": " << rep.entries.size() - rep.failures() << "/"
                      << rep.entries.size() << " reports within tolerance\n";
            return exit_code(rep);
        });
    }
    if (*components) {
        return guarded([&] {
            const RunConfig cfg = load();
            const auto rows = emit_components(cfg);
            const std::string text =
                cfg.format == "csv" ? components_to_csv(rows) : components_to_json(rows).dump(2) + "\n";
            return write_output(cfg.output, text);
        });
    }
    return guarded([&] {
        const RunConfig cfg = load();
        json out = json::array();
        for (const auto& r : spectrum_cmd(cfg)) out.push_back(spectrum_to_json(r));
        return write_output(cfg.output, out.dump(2) + "\n");
    });
}
