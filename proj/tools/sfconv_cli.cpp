// Command-line front end: algorithm validation, the summary table, quantized
// simulation, bit-operation estimates, and a wall-clock benchmark.
//
// Exit codes: 0 on success, 1 when a validation or accuracy assertion fails,
// 2 for usage or configuration problems.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfconv/analysis.hpp"
#include "sfconv/conv.hpp"
#include "sfconv/iterative.hpp"
#include "sfconv/manifest.hpp"
#include "sfconv/quant.hpp"
#include "sfconv/spec.hpp"
#include "sfconv/tensor.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 0x5fc07751u;

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed) {
    if (seed_given) return seed;
    if (const char* env = std::getenv("SFC_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 0);
        if (end && *end == '\0') return v;
        std::cerr << "warning: ignoring malformed SFC_SEED value\n";
    }
    return kDefaultSeed;
}

void fill_gaussian(sfconv::DenseTensor& t, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& v : t.data) v = dist(rng);
}

// Smoothed noise with most of its energy at low frequencies, closer to what
// feature maps look like in practice than white noise.
void fill_onef(sfconv::DenseTensor& t, std::mt19937_64& rng) {
    fill_gaussian(t, rng);
    const int B = t.dim(0), C = t.dim(1), H = t.dim(2), W = t.dim(3);
    std::vector<double> row(std::size_t(std::max(H, W)));
    for (int pass = 0; pass < 3; ++pass)
        for (int b = 0; b < B; ++b)
            for (int c = 0; c < C; ++c) {
                for (int h = 0; h < H; ++h) {
                    for (int w = 0; w < W; ++w) {
                        const double l = t.at4(b, c, h, std::max(0, w - 1));
                        const double r = t.at4(b, c, h, std::min(W - 1, w + 1));
                        row[std::size_t(w)] = (l + t.at4(b, c, h, w) + r) / 3.0;
                    }
                    for (int w = 0; w < W; ++w) t.at4(b, c, h, w) = row[std::size_t(w)];
                }
                for (int w = 0; w < W; ++w) {
                    for (int h = 0; h < H; ++h) {
                        const double u = t.at4(b, c, std::max(0, h - 1), w);
                        const double d = t.at4(b, c, std::min(H - 1, h + 1), w);
                        row[std::size_t(h)] = (u + t.at4(b, c, h, w) + d) / 3.0;
                    }
                    for (int h = 0; h < H; ++h) t.at4(b, c, h, w) = row[std::size_t(h)];
                }
            }
    double energy = 0.0;
    for (double v : t.data) energy += v * v;
    const double norm = energy > 0.0 ? std::sqrt(double(t.data.size()) / energy) : 1.0;
    for (auto& v : t.data) v *= norm;
}

void fill_tensor(sfconv::DenseTensor& t, const std::string& gen, std::mt19937_64& rng) {
    if (gen == "gaussian")
        fill_gaussian(t, rng);
    else if (gen == "onef")
        fill_onef(t, rng);
    else
        throw CLI::ValidationError("--gen", "unknown generator '" + gen + "'");
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

sfconv::RunManifest make_manifest(const std::string& command, const std::string& config_path,
                                  std::uint64_t seed, const std::string& outdir) {
    sfconv::RunManifest m;
    m.command = command;
    m.config_path = config_path;
    m.seed = seed;
    m.output_dir = outdir;
    m.catalog_hash = sfconv::catalog_hash();
    return m;
}

std::vector<std::string> algo_selection(const std::string& algo) {
    if (algo.empty() || algo == "all") return sfconv::catalog_names();
    return {algo};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tiled fast convolution toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = kDefaultSeed;
    bool seed_given = false;
    app.add_option("--seed", seed, "RNG seed (falls back to SFC_SEED, then a fixed default)")
        ->each([&seed_given](const std::string&) { seed_given = true; });

    // --- validate ---
    auto* validate = app.add_subcommand("validate", "Check every catalog algorithm against the direct method");
    std::string val_algo = "all";
    int val_trials = 8;
    validate->add_option("--algo", val_algo, "Algorithm name, or 'all'");
    validate->add_option("--trials", val_trials, "Random tiles per algorithm")->check(CLI::PositiveNumber);

    // --- table1 ---
    auto* table = app.add_subcommand("table1", "Print the catalog summary table (CSV)");
    std::string table_out;
    table->add_option("--out", table_out, "Directory to write table1.csv and manifest.json into");

    // --- catalog ---
    auto* catalog = app.add_subcommand("catalog", "Export every algorithm's matrices as JSON");
    std::string catalog_out;
    catalog->add_option("--out", catalog_out, "File to write (stdout when omitted)");

    // --- quantsim ---
    auto* quant = app.add_subcommand("quantsim", "Quantized transform-domain simulation");
    std::string q_algo = "sfc6-6x6-3x3", q_layers, q_out, q_act = "tensor", q_fil = "channel",
                q_search = "minmax", q_gen = "gaussian";
    int q_bits = 8, q_channels = 4, q_out_channels = 4, q_size = 24, q_padding = 1;
    quant->add_option("--algo", q_algo, "Catalog algorithm to simulate");
    quant->add_option("--layers", q_layers, "JSON layer list (overrides the inline dimensions)");
    quant->add_option("--bits", q_bits, "Quantized width")->check(CLI::Range(2, 16));
    quant->add_option("--act-scope", q_act, "Activation scale grouping: tensor | frequency");
    quant->add_option("--filter-scope", q_fil,
                      "Filter scale grouping: channel | frequency | channel-frequency");
    quant->add_option("--search", q_search, "Scale selection: minmax | mse");
    quant->add_option("--gen", q_gen, "Input generator: gaussian | onef");
    quant->add_option("--channels", q_channels, "Input channels")->check(CLI::PositiveNumber);
    quant->add_option("--out-channels", q_out_channels, "Output channels")->check(CLI::PositiveNumber);
    quant->add_option("--size", q_size, "Input height and width")->check(CLI::PositiveNumber);
    quant->add_option("--padding", q_padding, "Zero padding")->check(CLI::NonNegativeNumber);
    quant->add_option("--out", q_out, "Directory for quantsim.json");

    // --- bops ---
    auto* bops = app.add_subcommand("bops", "Bit-operation estimates for a layer list");
    std::string b_layers, b_algo = "all", b_out;
    int b_act_bits = 8, b_acc_bits = 32;
    bops->add_option("--layers", b_layers, "JSON layer list")->required();
    bops->add_option("--algo", b_algo, "Algorithm name, or 'all'");
    bops->add_option("--act-bits", b_act_bits, "Activation width")->check(CLI::Range(2, 16));
    bops->add_option("--acc-bits", b_acc_bits, "Accumulator width")->check(CLI::Range(8, 64));
    bops->add_option("--out", b_out, "Directory for bops.json");

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "Wall-clock benchmark against the direct method");
    std::string bench_algo = "sfc6-6x6-3x3", bench_gen = "gaussian";
    int bench_channels = 8, bench_out_channels = 8, bench_size = 56, bench_padding = 1,
        bench_threads = 1, bench_reps = 3;
    bool bench_reduced = false;
    bench->add_option("--algo", bench_algo, "Catalog algorithm");
    bench->add_option("--gen", bench_gen, "Input generator: gaussian | onef");
    bench->add_option("--channels", bench_channels, "Input channels")->check(CLI::PositiveNumber);
    bench->add_option("--out-channels", bench_out_channels, "Output channels")->check(CLI::PositiveNumber);
    bench->add_option("--size", bench_size, "Input height and width")->check(CLI::PositiveNumber);
    bench->add_option("--padding", bench_padding, "Zero padding")->check(CLI::NonNegativeNumber);
    bench->add_option("--threads", bench_threads, "Worker threads for the tiled path")
        ->check(CLI::PositiveNumber);
    bench->add_option("--reps", bench_reps, "Timed repetitions")->check(CLI::PositiveNumber);
    bench->add_flag("--reduced", bench_reduced, "Use the paired-channel product schedule");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::uint64_t run_seed = resolve_seed(seed_given, seed);

    try {
        if (validate->parsed()) {
            bool all_ok = true;
            for (const std::string& name : algo_selection(val_algo)) {
                const sfconv::AlgorithmSpec& spec = sfconv::catalog_algorithm(name);
                const sfconv::ValidationReport rep =
                    sfconv::validate_algorithm(spec, val_trials, run_seed);
                std::cout << (rep.ok ? "PASS " : "FAIL ") << name << " (" << rep.trials
                          << " trials)";
                if (!rep.ok) std::cout << ": " << rep.detail;
                std::cout << '\n';
                all_ok = all_ok && rep.ok;
            }
            const sfconv::BilinearStage inner = sfconv::iterative_inner_stage();
            const sfconv::BilinearStage outer = sfconv::iterative_outer_stage();
            try {
                sfconv::validate_stage(inner, val_trials, run_seed);
                sfconv::validate_stage(outer, val_trials, run_seed);
                std::cout << "PASS iterative stages (" << val_trials << " trials)\n";
            } catch (const std::exception& e) {
                std::cout << "FAIL iterative stages: " << e.what() << '\n';
                all_ok = false;
            }
            return all_ok ? 0 : 1;
        }

        if (table->parsed()) {
            const std::string csv = sfconv::catalog_table_csv();
            if (table_out.empty()) {
                std::cout << csv;
            } else {
                std::filesystem::create_directories(table_out);
                write_text(table_out + "/table1.csv", csv);
                write_text(table_out + "/manifest.json",
                           make_manifest("table1", "", run_seed, table_out).to_json() + "\n");
                std::cout << "wrote " << table_out << "/table1.csv\n";
            }
            return 0;
        }

        if (catalog->parsed()) {
            const std::string body = sfconv::catalog_export_json();
            if (catalog_out.empty())
                std::cout << body << '\n';
            else
                write_text(catalog_out, body + "\n");
            return 0;
        }

        if (quant->parsed()) {
            sfconv::QuantConfig cfg;
            cfg.bits = q_bits;
            if (q_act == "tensor") cfg.act_scope = sfconv::ActScaleScope::PerTensor;
            else if (q_act == "frequency") cfg.act_scope = sfconv::ActScaleScope::PerFrequency;
            else throw CLI::ValidationError("--act-scope", "unknown grouping '" + q_act + "'");
            if (q_fil == "channel") cfg.filter_scope = sfconv::FilterScaleScope::PerChannel;
            else if (q_fil == "frequency") cfg.filter_scope = sfconv::FilterScaleScope::PerFrequency;
            else if (q_fil == "channel-frequency")
                cfg.filter_scope = sfconv::FilterScaleScope::PerChannelFrequency;
            else throw CLI::ValidationError("--filter-scope", "unknown grouping '" + q_fil + "'");
            if (q_search == "minmax") cfg.search = sfconv::ScaleSearch::MinMax;
            else if (q_search == "mse") cfg.search = sfconv::ScaleSearch::MseGrid;
            else throw CLI::ValidationError("--search", "unknown search '" + q_search + "'");

            std::vector<sfconv::LayerConfig> layers;
            if (!q_layers.empty()) {
                layers = sfconv::load_layer_configs(q_layers);
            } else {
                sfconv::LayerConfig layer;
                layer.name = "inline";
                layer.in_channels = q_channels;
                layer.out_channels = q_out_channels;
                layer.height = layer.width = q_size;
                layer.padding = q_padding;
                const sfconv::AlgorithmSpec& spec = sfconv::catalog_algorithm(q_algo);
                layer.kernel = spec.R;
                layers.push_back(layer);
            }

            const sfconv::AlgorithmSpec& spec = sfconv::catalog_algorithm(q_algo);
            for (const sfconv::LayerConfig& layer : layers)
                if (layer.kernel != spec.R)
                    throw std::runtime_error("layer '" + layer.name + "' kernel " +
                                             std::to_string(layer.kernel) +
                                             " does not match algorithm " + spec.name);
            std::mt19937_64 rng(run_seed);
            nlohmann::json results = nlohmann::json::array();
            for (const sfconv::LayerConfig& layer : layers) {
                sfconv::DenseTensor input({1, layer.in_channels, layer.height, layer.width});
                sfconv::DenseTensor filters(
                    {layer.out_channels, layer.in_channels, layer.kernel, layer.kernel});
                fill_tensor(input, q_gen, rng);
                fill_gaussian(filters, rng);
                const sfconv::QuantReport rep =
                    sfconv::quantized_fast_conv2d(input, filters, spec, layer.padding, cfg);
                nlohmann::json row;
                row["layer"] = layer.name;
                row["algorithm"] = spec.name;
                row["bits"] = cfg.bits;
                row["act_scope"] = q_act;
                row["filter_scope"] = q_fil;
                row["search"] = q_search;
                row["mse"] = rep.mse;
                row["snr_db"] = rep.snr_db;
                row["saturations"] = rep.saturations;
                row["values_quantized"] = rep.values_quantized;
                results.push_back(row);
                std::cout << layer.name << ": snr " << rep.snr_db << " dB, mse " << rep.mse
                          << ", saturated " << rep.saturations << "\n";
            }
            if (!q_out.empty()) {
                std::filesystem::create_directories(q_out);
                nlohmann::json doc;
                doc["manifest"] =
                    nlohmann::json::parse(make_manifest("quantsim", q_layers, run_seed, q_out).to_json());
                doc["results"] = results;
                write_text(q_out + "/quantsim.json", doc.dump(2) + "\n");
                std::cout << "wrote " << q_out << "/quantsim.json\n";
            }
            return 0;
        }

        if (bops->parsed()) {
            const std::vector<sfconv::LayerConfig> layers = sfconv::load_layer_configs(b_layers);
            nlohmann::json results = nlohmann::json::array();
            for (const sfconv::LayerConfig& layer : layers) {
                for (const std::string& name : algo_selection(b_algo)) {
                    const sfconv::AlgorithmSpec& spec = sfconv::catalog_algorithm(name);
                    if (spec.R != layer.kernel) continue;
                    const sfconv::BopsBreakdown bd =
                        sfconv::bops_for_layer(spec, layer, b_act_bits, b_acc_bits);
                    nlohmann::json row;
                    row["layer"] = layer.name;
                    row["algorithm"] = name;
                    row["input_transform"] = bd.input_transform;
                    row["filter_transform"] = bd.filter_transform;
                    row["output_transform"] = bd.output_transform;
                    row["products"] = bd.products;
                    row["accumulation"] = bd.accumulation;
                    row["total"] = bd.total();
                    results.push_back(row);
                    std::cout << layer.name << ' ' << name << ": " << bd.total() << " bops\n";
                }
            }
            if (results.empty())
                throw std::runtime_error("no algorithm in the selection matches the layer kernels");
            if (!b_out.empty()) {
                std::filesystem::create_directories(b_out);
                nlohmann::json doc;
                doc["manifest"] =
                    nlohmann::json::parse(make_manifest("bops", b_layers, run_seed, b_out).to_json());
                doc["results"] = results;
                write_text(b_out + "/bops.json", doc.dump(2) + "\n");
                std::cout << "wrote " << b_out << "/bops.json\n";
            }
            return 0;
        }

        if (bench->parsed()) {
            const sfconv::AlgorithmSpec& spec = sfconv::catalog_algorithm(bench_algo);
            sfconv::DenseTensor input({1, bench_channels, bench_size, bench_size});
            sfconv::DenseTensor filters(
                {bench_out_channels, bench_channels, spec.R, spec.R});
            std::mt19937_64 rng(run_seed);
            fill_tensor(input, bench_gen, rng);
            fill_gaussian(filters, rng);

            sfconv::FastConvOptions opts;
            opts.threads = bench_threads;
            opts.reduced_products = bench_reduced;

            const sfconv::DenseTensor ref = sfconv::direct_conv2d(input, filters, 1, bench_padding);
            const sfconv::DenseTensor fast =
                sfconv::fast_conv2d(input, filters, spec, bench_padding, opts);
            const double rel = max_abs_diff(ref.data, fast.data) / std::max(max_abs(ref.data), 1e-300);
            if (rel > 1e-6) {
                std::cerr << "FAIL " << spec.name << ": fast path deviates from direct by " << rel
                          << " (relative), refusing to time\n";
                return 1;
            }

            using clock = std::chrono::steady_clock;
            auto time_of = [&](auto&& fn) {
                double best = 1e300;
                for (int i = 0; i < bench_reps; ++i) {
                    const auto t0 = clock::now();
                    fn();
                    const auto t1 = clock::now();
                    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
                }
                return best;
            };
            const double t_direct =
                time_of([&] { sfconv::direct_conv2d(input, filters, 1, bench_padding); });
            sfconv::ConvCounters counters;
            opts.counters = &counters;
            const double t_fast =
                time_of([&] { sfconv::fast_conv2d(input, filters, spec, bench_padding, opts); });

            std::cout << "algorithm        " << spec.name << "\n"
                      << "agreement        " << rel << " (max relative deviation)\n"
                      << "direct           " << t_direct * 1e3 << " ms\n"
                      << "tiled            " << t_fast * 1e3 << " ms (threads=" << bench_threads
                      << (bench_reduced ? ", paired products" : "") << ")\n"
                      << "speedup          " << t_direct / t_fast << "x\n"
                      << "products         " << counters.multiplications / bench_reps
                      << " per pass over " << counters.tiles / bench_reps << " tiles\n";
            return 0;
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "internal check failed: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
