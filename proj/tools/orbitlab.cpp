// Copyright 2026 The orbitlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// orbitlab command-line front end.
//
//   orbitlab <scenario> --config <path> --seed <u64> --out <dir> [--exact] [--parallel <n>]
//   orbitlab list

#include "orbitlab/config.hpp"
#include "orbitlab/run.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

struct ScenarioArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool exact = false;
    bool timing = false;
    int parallel = 1;
};

int run(const std::string& name, const ScenarioArgs& a) {
    using namespace orbitlab;
    Config config = a.config_path.empty() ? Config{} : parse_config(a.config_path);
    if (a.exact) {
        config.repetitions = 0;
    }
    if (!std::filesystem::is_directory(a.out_dir)) {
        std::filesystem::create_directories(a.out_dir);
    }
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord record = run_scenario(name, config, a.seed, a.parallel);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (a.timing) {
        record.wall_clock_seconds = seconds;
    }
    const auto written = write_outputs(record, a.out_dir);
    for (const auto& p : written) {
        std::cout << p.string() << '\n';
    }
    std::cerr << name << ": done in " << seconds << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbitlab: randomized-benchmarking driven gate calibration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ORBITLAB_VERSION));

    auto* list = app.add_subcommand("list", "List the available scenarios");
    list->callback([] {
        for (const auto& n : orbitlab::scenario_names()) {
            std::cout << n << "\t" << orbitlab::scenario_description(n) << '\n';
        }
    });

    auto* defaults = app.add_subcommand("defaults", "Print the default configuration with every key");
    defaults->callback([] { std::cout << orbitlab::emit_config(orbitlab::Config{}); });

    ScenarioArgs args;
    std::string chosen;
    for (const auto& name : orbitlab::scenario_names()) {
        auto* sub = app.add_subcommand(name, orbitlab::scenario_description(name));
        sub->add_option("--config", args.config_path, "Flat key: value config file (defaults if omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seed, "Master seed")->required();
        sub->add_option("--out", args.out_dir, "Output directory (created if missing)")->required();
        sub->add_flag("--exact", args.exact, "Exact expectation values instead of sampled shots (repetitions = 0)");
        sub->add_option("--parallel", args.parallel, "Worker threads per RB evaluation")
            ->check(CLI::Range(1, 1024));
        sub->add_flag("--timing", args.timing,
                      "Store the wall-clock duration in record.json (makes reruns differ byte-wise)");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (chosen.empty()) {
        return 0;
    }
    try {
        return run(chosen, args);
    } catch (const std::exception& e) {
        std::cerr << "orbitlab " << chosen << ": error: " << e.what() << '\n';
        return 1;
    }
}
