// finprint: imbalance feeds -> daily fingerprints -> GAN affinity report.
//
// Subcommands (each stage re-runnable from the previous stage's files):
//   synth        emit a synthetic TAQ-format day plus ground truth
//   parse        parse a message file and report stats
//   fingerprint  build market/etf fingerprints for one day
//   pools        compose the tr1..tr5 / tes1..tes5 sample pools
//   train        train the GAN on one pool and persist the fake set
//   analyze      run the 5x5 grid of (test, train) cells
//   report       render the MInfo table and averages
//   pipeline     chain everything from one flat config file

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finprint/etf.hpp"
#include "finprint/feed.hpp"
#include "finprint/fingerprint.hpp"
#include "finprint/gan.hpp"
#include "finprint/manifest.hpp"
#include "finprint/metrics.hpp"
#include "finprint/pgm.hpp"
#include "finprint/pools.hpp"
#include "finprint/synth.hpp"
#include "finprint/text.hpp"

namespace fs = std::filesystem;
using namespace finprint;

namespace {

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

Fingerprint load_fingerprint(const fs::path& path) {
    auto in = open_in(path);
    return read_fingerprint(in);
}

void save_fingerprint(const Fingerprint& fp, const fs::path& path, bool with_pgm = true) {
    auto out = open_out(path);
    write_fingerprint(fp, out);
    if (with_pgm) {
        auto img = open_out(fs::path(path).replace_extension(".pgm"));
        write_pgm(fp.cells, img);
    }
}

SamplePool load_pool(const fs::path& manifest_path) {
    auto in = open_in(manifest_path);
    const auto rows = read_pool_manifest(in);
    if (rows.empty()) throw std::runtime_error("empty pool manifest " + manifest_path.string());
    SamplePool pool;
    pool.spec = mix_by_label(rows.front().pool_label);
    for (const auto& row : rows) {
        fs::path fp_path = row.fingerprint_path;
        if (fp_path.is_relative()) fp_path = manifest_path.parent_path() / fp_path;
        PoolMember m{row.day_label, row.family, row.fingerprint_path,
                     load_fingerprint(fp_path)};
        if (m.family == Family::market) ++pool.market_members;
        else ++pool.etf_members;
        pool.members.push_back(std::move(m));
    }
    return pool;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::uint64_t seed = 1;
    std::int64_t messages = 100'000;
    int symbols = 100;
    double etf_share = 0.125;
    double etf_dollar_share = 0.60;
    double malformed = 0.0;
    double open_w = 0.3, midday_w = 0.2, close_w = 0.5;
    std::string day = "day01";
    std::string out;
    std::string truth;
    std::string names_out;
};

nlohmann::json truth_to_json(const SynthTruth& t) {
    nlohmann::json j{
        {"day", t.day_label},
        {"type3", t.type3},
        {"type34", t.type34},
        {"type105", t.type105},
        {"in_session_105", t.in_session_105},
        {"etf_105", t.etf_105},
        {"post_close_105", t.post_close_105},
        {"malformed", t.malformed},
        {"dollar_total", t.dollar_total},
        {"dollar_etf", t.dollar_etf},
        {"bin_counts", t.bin_counts},
        {"bin_counts_etf", t.bin_counts_etf},
        {"etf_symbols", t.etf_symbols},
    };
    nlohmann::json settle = nlohmann::json::object();
    for (const auto& [sym, q] : t.settle) settle[sym] = q;
    j["settle"] = settle;
    return j;
}

SynthConfig to_config(const SynthArgs& a) {
    SynthConfig cfg;
    cfg.seed = a.seed;
    cfg.n_symbols = a.symbols;
    cfg.total_messages = a.messages;
    cfg.etf_message_share = a.etf_share;
    cfg.etf_dollar_share = a.etf_dollar_share;
    cfg.malformed_fraction = a.malformed;
    cfg.intensity.open_weight = a.open_w;
    cfg.intensity.midday_weight = a.midday_w;
    cfg.intensity.close_weight = a.close_w;
    return cfg;
}

int run_synth(const SynthArgs& a) {
    StageTimer timer;
    const auto day = generate_day(to_config(a), a.day);

    auto out = open_out(a.out);
    for (const auto& line : day.lines) out << line << '\n';
    if (!a.names_out.empty()) {
        auto names = open_out(a.names_out);
        for (const auto& e : day.truth.names) names << e.symbol << '|' << e.long_name << '\n';
    }
    if (!a.truth.empty()) {
        auto truth = open_out(a.truth);
        truth << truth_to_json(day.truth).dump(2) << '\n';
    }

    RunManifest man;
    man.command = "synth";
    man.config = {{"messages", a.messages}, {"symbols", a.symbols},
                  {"etf_share", a.etf_share}, {"etf_dollar_share", a.etf_dollar_share},
                  {"day", a.day}};
    man.seed = a.seed;
    man.output_paths = {a.out};
    if (!a.names_out.empty()) man.output_paths.push_back(a.names_out);
    if (!a.truth.empty()) man.output_paths.push_back(a.truth);
    man.duration_seconds = timer.seconds();
    man.write(a.out + ".manifest.json");

    std::cout << "synth: " << day.lines.size() << " lines -> " << a.out << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// parse
// ---------------------------------------------------------------------------

int run_parse(const std::string& in_path, const std::string& stats_out) {
    StageTimer timer;
    auto in = open_in(in_path);
    MessageStream stream(in);
    while (stream.next()) {
    }
    const std::string report = stream.stats().report();
    if (stats_out.empty()) {
        std::cout << report;
    } else {
        auto out = open_out(stats_out);
        out << report;
        RunManifest man;
        man.command = "parse";
        man.input_paths = {in_path};
        man.output_paths = {stats_out};
        man.duration_seconds = timer.seconds();
        man.write(stats_out + ".manifest.json");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fingerprint
// ---------------------------------------------------------------------------

struct FingerprintArgs {
    std::string in;
    std::string names;
    char names_delim = '|';
    std::string day = "day01";
    std::string mode = "time_price";
    std::string out_dir = ".";
};

int run_fingerprint(const FingerprintArgs& a) {
    StageTimer timer;
    SymbolUniverse universe;
    if (!a.names.empty()) {
        auto names_in = open_in(a.names);
        universe = build_universe(read_name_list(names_in, a.names_delim));
    }
    const auto mode = mode_from_string(a.mode);
    if (!mode) throw std::runtime_error("unknown fingerprint mode \"" + a.mode + "\"");

    auto in = open_in(a.in);
    MessageStream stream(in);
    std::vector<ImbalanceMessage> market, etf;
    while (auto msg = stream.next()) {
        if (const auto* m = std::get_if<ImbalanceMessage>(&*msg)) {
            market.push_back(*m);
            if (universe.contains(m->symbol)) etf.push_back(*m);
        }
    }

    const auto market_agg = aggregate_day(market, BinGrid{}, Family::market, a.day);
    const auto etf_agg = aggregate_day(etf, BinGrid{}, Family::etf, a.day);
    const fs::path dir = a.out_dir;
    const fs::path market_path = dir / (a.day + ".market.fp");
    const fs::path etf_path = dir / (a.day + ".etf.fp");
    save_fingerprint(build_fingerprint(market_agg, *mode), market_path);
    save_fingerprint(build_fingerprint(etf_agg, *mode), etf_path);

    // per-bin summary for intensity / dollar-share plots
    const fs::path summary_path = dir / (a.day + ".summary.csv");
    {
        auto csv = open_out(summary_path);
        csv << "time_bin,market_count,etf_count,market_dollar,etf_dollar\n";
        for (int i = 0; i < market_agg.grid.n_time_bins; ++i) {
            double md = 0.0, ed = 0.0;
            for (int j = 0; j < market_agg.grid.n_price_bins; ++j) {
                md += market_agg.dollar.at(i, j);
                ed += etf_agg.dollar.at(i, j);
            }
            csv << i << ',' << market_agg.msg_count[static_cast<std::size_t>(i)] << ','
                << etf_agg.msg_count[static_cast<std::size_t>(i)] << ','
                << format_double(md) << ',' << format_double(ed) << '\n';
        }
    }

    RunManifest man;
    man.command = "fingerprint";
    man.config = {{"day", a.day}, {"mode", a.mode}};
    man.input_paths = {a.in};
    if (!a.names.empty()) man.input_paths.push_back(a.names);
    man.output_paths = {market_path.string(), etf_path.string(), summary_path.string()};
    man.duration_seconds = timer.seconds();
    man.write((dir / (a.day + ".fingerprint.manifest.json")).string());

    double market_dollars = 0.0, etf_dollars = 0.0;
    for (double v : market_agg.dollar.v) market_dollars += v;
    for (double v : etf_agg.dollar.v) etf_dollars += v;
    std::cout << "fingerprint: " << market.size() << " type-105 messages ("
              << etf.size() << " etf) -> " << market_path.string() << ", "
              << etf_path.string() << '\n';
    if (!market.empty() && market_dollars > 0.0)
        std::cout << "  etf message share " << format_double(
                         static_cast<double>(etf.size()) / static_cast<double>(market.size()))
                  << ", etf dollar share "
                  << format_double(etf_dollars / market_dollars) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// pools
// ---------------------------------------------------------------------------

struct PoolsArgs {
    std::string fp_dir;
    int pool_size = 5;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

int run_pools(const PoolsArgs& a) {
    StageTimer timer;
    std::vector<Fingerprint> market_days, etf_days;
    std::vector<std::string> market_paths, etf_paths;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.fp_dir))
        if (entry.path().extension() == ".fp") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        Fingerprint fp = load_fingerprint(path);
        if (fp.family == Family::market) {
            market_days.push_back(std::move(fp));
            market_paths.push_back(fs::absolute(path).string());
        } else {
            etf_days.push_back(std::move(fp));
            etf_paths.push_back(fs::absolute(path).string());
        }
    }
    if (market_days.empty() && etf_days.empty())
        throw std::runtime_error("no .fp files found under " + a.fp_dir);

    RunManifest man;
    man.command = "pools";
    man.config = {{"pool_size", a.pool_size}};
    man.seed = a.seed;
    man.duration_seconds = 0.0;

    const auto mixes = standard_mixes();
    for (std::size_t mix_idx = 0; mix_idx < mixes.size(); ++mix_idx) {
        const auto& spec = mixes[mix_idx];
        SamplePool pool = build_pool(spec, market_days, etf_days, a.pool_size,
                                     derive_seed(a.seed, mix_idx));
        // attach source paths for the manifest
        for (auto& m : pool.members) {
            const auto& paths = m.family == Family::market ? market_paths : etf_paths;
            const auto& days = m.family == Family::market ? market_days : etf_days;
            for (std::size_t i = 0; i < days.size(); ++i)
                if (days[i].day_label == m.day_label) m.source_path = paths[i];
        }
        const fs::path out_path = fs::path(a.out_dir) / (spec.label + ".pool.csv");
        auto out = open_out(out_path);
        write_pool_manifest(pool, out);
        man.output_paths.push_back(out_path.string());
    }
    man.duration_seconds = timer.seconds();
    man.write((fs::path(a.out_dir) / "pools.manifest.json").string());
    std::cout << "pools: " << market_days.size() << " market + " << etf_days.size()
              << " etf fingerprints -> 10 manifests under " << a.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string pool;
    int epochs = 1600;
    int noise_dim = 64;
    int window = 400;
    int stride = 20;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

TrainConfig to_config(const TrainArgs& a) {
    TrainConfig cfg;
    cfg.epochs = a.epochs;
    cfg.noise_dim = a.noise_dim;
    cfg.snapshot_window = a.window;
    cfg.snapshot_stride = a.stride;
    cfg.seed = a.seed;
    return cfg;
}

void write_trace_csv(const TrainTrace& trace, const fs::path& path) {
    auto out = open_out(path);
    out << "epoch,generator_loss,discriminator_loss\n";
    for (std::size_t e = 0; e < trace.generator_loss.size(); ++e)
        out << e << ',' << format_double(trace.generator_loss[e]) << ','
            << format_double(trace.discriminator_loss[e]) << '\n';
}

int run_train(const TrainArgs& a) {
    StageTimer timer;
    const SamplePool pool = load_pool(a.pool);
    const TrainConfig cfg = to_config(a);
    const TrainResult run = train(pool, cfg);
    const FakeImageSet fakes = collect_fakes(run, cfg);

    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (std::size_t i = 0; i < fakes.images.size(); ++i) {
        Fingerprint fp;
        fp.cells = fakes.images[i];
        fp.day_label = "fake-e" + std::to_string(fakes.source_epochs[i]);
        fp.family = Family::market;
        fp.mode = FingerprintMode::time_price;
        char name[32];
        std::snprintf(name, sizeof name, "fake_%02zu.fp", i);
        const fs::path path = dir / name;
        save_fingerprint(fp, path);
        outputs.push_back(path.string());
    }
    write_trace_csv(run.trace, dir / "trace.csv");
    outputs.push_back((dir / "trace.csv").string());

    RunManifest man;
    man.command = "train";
    man.config = {{"epochs", a.epochs}, {"noise_dim", a.noise_dim},
                  {"snapshot_window", a.window}, {"snapshot_stride", a.stride},
                  {"pool", pool.spec.label}, {"source_epochs", fakes.source_epochs}};
    man.seed = a.seed;
    man.input_paths = {a.pool};
    man.output_paths = outputs;
    man.duration_seconds = timer.seconds();
    man.write((dir / "train.manifest.json").string());

    std::cout << "train: pool " << pool.spec.label << ", " << a.epochs << " epochs, "
              << fakes.images.size() << " fakes -> " << dir.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string pools_dir;
    int epochs = 1600;
    int noise_dim = 64;
    int window = 400;
    int stride = 20;
    int runs = 2;
    int jobs = 2;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

struct CellTask {
    int test_idx;
    int train_idx;
    int run;
};

struct CellTerm {
    std::string test_label;
    std::string train_label;
    int run;
    double term;
    std::vector<CosinePair> pairs;
};

int run_analyze(const AnalyzeArgs& a) {
    StageTimer timer;
    std::vector<SamplePool> train_pools, test_pools;
    for (int k = 1; k <= 5; ++k) {
        train_pools.push_back(load_pool(fs::path(a.pools_dir) /
                                        ("tr" + std::to_string(k) + ".pool.csv")));
        test_pools.push_back(load_pool(fs::path(a.pools_dir) /
                                       ("tes" + std::to_string(k) + ".pool.csv")));
    }
    std::vector<Mat> train_images, test_images;
    for (const auto& p : train_pools) train_images.push_back(pool_image(p));
    for (const auto& p : test_pools) test_images.push_back(pool_image(p));

    std::vector<CellTask> tasks;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int r = 0; r < a.runs; ++r) tasks.push_back({i, j, r});

    std::vector<CellTerm> terms(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const CellTask task = tasks[t];
            TrainConfig cfg;
            cfg.epochs = a.epochs;
            cfg.noise_dim = a.noise_dim;
            cfg.snapshot_window = a.window;
            cfg.snapshot_stride = a.stride;
            cfg.seed = derive_seed(a.seed, static_cast<std::uint64_t>(task.test_idx),
                                   static_cast<std::uint64_t>(task.train_idx),
                                   static_cast<std::uint64_t>(task.run));
            const TrainResult run = train(train_pools[static_cast<std::size_t>(task.train_idx)], cfg);
            const FakeImageSet fakes = collect_fakes(run, cfg);

            std::vector<CosinePair> pairs;
            std::vector<std::vector<CosinePair>> one_run(1);
            for (const Mat& fake : fakes.images) {
                const auto [ct, cs] = cosine_stable(
                    train_images[static_cast<std::size_t>(task.train_idx)],
                    test_images[static_cast<std::size_t>(task.test_idx)], fake);
                one_run[0].push_back({ct.value, cs.value});
            }
            const MInfoResult res = minfo(one_run);
            CellTerm& out = terms[t];
            out.test_label = "tes" + std::to_string(task.test_idx + 1);
            out.train_label = "tr" + std::to_string(task.train_idx + 1);
            out.run = task.run;
            out.term = res.per_run_terms[0];
            out.pairs = one_run[0];
            {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cout << "analyze: " << out.test_label << " x " << out.train_label
                          << " run " << task.run << " term " << format_double(out.term)
                          << '\n';
            }
        }
    };
    std::vector<std::thread> threads;
    const int jobs = std::max(1, a.jobs);
    for (int w = 0; w < jobs; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();

    fs::create_directories(a.out_dir);
    const fs::path terms_path = fs::path(a.out_dir) / "minfo_terms.csv";
    {
        auto out = open_out(terms_path);
        out << "test_label,train_label,run,minfo_term\n";
        for (const auto& t : terms)
            out << t.test_label << ',' << t.train_label << ',' << t.run << ','
                << format_double(t.term) << '\n';
    }
    const fs::path cos_path = fs::path(a.out_dir) / "cosines.csv";
    {
        auto out = open_out(cos_path);
        out << "test_label,train_label,run,fake_index,c_train_fake,c_test_fake\n";
        for (const auto& t : terms)
            for (std::size_t f = 0; f < t.pairs.size(); ++f)
                out << t.test_label << ',' << t.train_label << ',' << t.run << ',' << f
                    << ',' << format_double(t.pairs[f].c_train_fake) << ','
                    << format_double(t.pairs[f].c_test_fake) << '\n';
    }

    RunManifest man;
    man.command = "analyze";
    man.config = {{"epochs", a.epochs}, {"runs", a.runs}, {"jobs", a.jobs},
                  {"snapshot_window", a.window}, {"snapshot_stride", a.stride}};
    man.seed = a.seed;
    man.output_paths = {terms_path.string(), cos_path.string()};
    man.duration_seconds = timer.seconds();
    man.write((fs::path(a.out_dir) / "analyze.manifest.json").string());
    std::cout << "analyze: " << tasks.size() << " trainings -> " << terms_path.string()
              << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int run_report(const std::string& runs_dir, const std::string& out_csv) {
    StageTimer timer;
    const fs::path terms_path = fs::path(runs_dir) / "minfo_terms.csv";
    auto in = open_in(terms_path);

    std::map<std::pair<std::string, std::string>, std::vector<std::pair<int, double>>> cells;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string test, tr, run_s, term_s;
        std::getline(ls, test, ',');
        std::getline(ls, tr, ',');
        std::getline(ls, run_s, ',');
        std::getline(ls, term_s, ',');
        cells[{test, tr}].push_back({std::stoi(run_s), *parse_double(term_s)});
    }

    std::vector<std::string> tes_labels, tr_labels;
    for (int k = 1; k <= 5; ++k) {
        tes_labels.push_back("tes" + std::to_string(k));
        tr_labels.push_back("tr" + std::to_string(k));
    }
    std::vector<std::vector<MInfoResult>> grid(5, std::vector<MInfoResult>(5));
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            auto it = cells.find({tes_labels[static_cast<std::size_t>(i)],
                                  tr_labels[static_cast<std::size_t>(j)]});
            if (it == cells.end())
                throw std::runtime_error("missing cell " +
                                         tes_labels[static_cast<std::size_t>(i)] + " x " +
                                         tr_labels[static_cast<std::size_t>(j)] + " in " +
                                         terms_path.string());
            auto runs = it->second;
            std::sort(runs.begin(), runs.end());
            MInfoResult& res = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            res.n_runs = static_cast<int>(runs.size());
            for (const auto& [run, term] : runs) res.per_run_terms.push_back(term);
            double total = 0.0;
            for (double t : res.per_run_terms) total += t;
            res.value = total / static_cast<double>(res.n_runs);
        }
    }
    const MInfoReport report = summarize(tes_labels, tr_labels, grid);
    const std::string table = render_report_text(report);
    std::cout << table;

    auto out = open_out(out_csv);
    out << "test_label,train_label,run,minfo_term\n";
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const auto& res = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            for (std::size_t r = 0; r < res.per_run_terms.size(); ++r)
                out << tes_labels[static_cast<std::size_t>(i)] << ','
                    << tr_labels[static_cast<std::size_t>(j)] << ',' << r << ','
                    << format_double(res.per_run_terms[r]) << '\n';
        }
    const fs::path table_path = fs::path(out_csv).parent_path() / "minfo_table.txt";
    {
        auto tbl = open_out(table_path);
        tbl << table;
    }

    RunManifest man;
    man.command = "report";
    man.input_paths = {terms_path.string()};
    man.output_paths = {out_csv, table_path.string()};
    man.duration_seconds = timer.seconds();
    man.write(out_csv + ".manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

struct PipelineArgs {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 2;
};

std::map<std::string, std::string> read_flat_config(const std::string& path) {
    std::map<std::string, std::string> kv;
    if (path.empty()) return kv;
    auto in = open_in(path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad config line (want key=value): " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

int run_pipeline(const PipelineArgs& a) {
    const auto conf = read_flat_config(a.config_path);
    auto get_i = [&](const char* key, std::int64_t fallback) {
        auto it = conf.find(key);
        return it == conf.end() ? fallback : std::stoll(it->second);
    };
    auto get_d = [&](const char* key, double fallback) {
        auto it = conf.find(key);
        return it == conf.end() ? fallback : std::stod(it->second);
    };
    auto get_s = [&](const char* key, std::string fallback) {
        auto it = conf.find(key);
        return it == conf.end() ? fallback : it->second;
    };

    const int days = static_cast<int>(get_i("days", 5));
    const std::int64_t messages = get_i("messages", 20'000);
    const int symbols = static_cast<int>(get_i("symbols", 100));
    const int pool_size = static_cast<int>(get_i("pool_size", 5));
    const int epochs = static_cast<int>(get_i("epochs", 120));
    const int window = static_cast<int>(get_i("snapshot_window", std::min(epochs, 40)));
    const int stride = static_cast<int>(get_i("snapshot_stride", std::max(1, window / 20)));
    const int runs = static_cast<int>(get_i("runs", 2));
    const int noise_dim = static_cast<int>(get_i("noise_dim", 64));
    const std::string mode = get_s("mode", "time_price");

    const fs::path out = a.out_dir;
    fs::create_directories(out);

    for (int d = 0; d < days; ++d) {
        char label[16];
        std::snprintf(label, sizeof label, "day%02d", d + 1);
        SynthArgs sa;
        sa.seed = derive_seed(a.seed, 0x646179ULL, static_cast<std::uint64_t>(d));
        sa.messages = messages;
        sa.symbols = symbols;
        sa.etf_share = get_d("etf_share", 0.125);
        sa.etf_dollar_share = get_d("etf_dollar_share", 0.60);
        sa.day = label;
        sa.out = (out / "synth" / (std::string(label) + ".msg")).string();
        sa.truth = (out / "synth" / (std::string(label) + ".truth.json")).string();
        sa.names_out = (out / "synth" / "names.txt").string();
        if (int rc = run_synth(sa); rc != 0) return rc;

        FingerprintArgs fa;
        fa.in = sa.out;
        fa.names = sa.names_out;
        fa.day = label;
        fa.mode = mode;
        fa.out_dir = (out / "fp").string();
        if (int rc = run_fingerprint(fa); rc != 0) return rc;
    }

    PoolsArgs pa;
    pa.fp_dir = (out / "fp").string();
    pa.pool_size = pool_size;
    pa.seed = derive_seed(a.seed, 0x706f6f6c73ULL);
    pa.out_dir = (out / "pools").string();
    if (int rc = run_pools(pa); rc != 0) return rc;

    AnalyzeArgs an;
    an.pools_dir = pa.out_dir;
    an.epochs = epochs;
    an.noise_dim = noise_dim;
    an.window = window;
    an.stride = stride;
    an.runs = runs;
    an.jobs = a.jobs;
    an.seed = derive_seed(a.seed, 0x616e6c7aULL);
    an.out_dir = (out / "analyze").string();
    if (int rc = run_analyze(an); rc != 0) return rc;

    return run_report(an.out_dir, (out / "report" / "minfo_report.csv").string());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"imbalance fingerprints and GAN affinity metrics"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic TAQ-format day");
    synth_cmd->add_option("--seed", synth_args.seed);
    synth_cmd->add_option("--messages", synth_args.messages);
    synth_cmd->add_option("--symbols", synth_args.symbols);
    synth_cmd->add_option("--etf-share", synth_args.etf_share);
    synth_cmd->add_option("--etf-dollar-share", synth_args.etf_dollar_share);
    synth_cmd->add_option("--malformed-fraction", synth_args.malformed);
    synth_cmd->add_option("--open-weight", synth_args.open_w);
    synth_cmd->add_option("--midday-weight", synth_args.midday_w);
    synth_cmd->add_option("--close-weight", synth_args.close_w);
    synth_cmd->add_option("--day", synth_args.day);
    synth_cmd->add_option("--out", synth_args.out)->required();
    synth_cmd->add_option("--truth", synth_args.truth);
    synth_cmd->add_option("--names-out", synth_args.names_out);

    std::string parse_in, parse_stats;
    auto* parse_cmd = app.add_subcommand("parse", "parse a message file and report stats");
    parse_cmd->add_option("--in", parse_in)->required();
    parse_cmd->add_option("--stats-out", parse_stats);

    FingerprintArgs fp_args;
    auto* fp_cmd = app.add_subcommand("fingerprint", "build daily market/etf fingerprints");
    fp_cmd->add_option("--in", fp_args.in)->required();
    fp_cmd->add_option("--names", fp_args.names);
    fp_cmd->add_option("--names-delim", fp_args.names_delim);
    fp_cmd->add_option("--day", fp_args.day);
    fp_cmd->add_option("--mode", fp_args.mode)
        ->check(CLI::IsMember({"time_price", "state_hist"}));
    fp_cmd->add_option("--out-dir", fp_args.out_dir);

    PoolsArgs pools_args;
    auto* pools_cmd = app.add_subcommand("pools", "compose the standard sample pools");
    pools_cmd->add_option("--fp-dir", pools_args.fp_dir)->required();
    pools_cmd->add_option("--pool-size", pools_args.pool_size);
    pools_cmd->add_option("--seed", pools_args.seed);
    pools_cmd->add_option("--out-dir", pools_args.out_dir);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train the GAN on one pool");
    train_cmd->add_option("--pool", train_args.pool)->required();
    train_cmd->add_option("--epochs", train_args.epochs);
    train_cmd->add_option("--noise-dim", train_args.noise_dim);
    train_cmd->add_option("--snapshot-window", train_args.window);
    train_cmd->add_option("--snapshot-stride", train_args.stride);
    train_cmd->add_option("--seed", train_args.seed);
    train_cmd->add_option("--out", train_args.out_dir);

    AnalyzeArgs an_args;
    auto* an_cmd = app.add_subcommand("analyze", "run the 5x5 (test x train) grid");
    an_cmd->add_option("--pools-dir", an_args.pools_dir)->required();
    an_cmd->add_option("--epochs", an_args.epochs);
    an_cmd->add_option("--noise-dim", an_args.noise_dim);
    an_cmd->add_option("--snapshot-window", an_args.window);
    an_cmd->add_option("--snapshot-stride", an_args.stride);
    an_cmd->add_option("--runs", an_args.runs);
    an_cmd->add_option("--jobs", an_args.jobs);
    an_cmd->add_option("--seed", an_args.seed);
    an_cmd->add_option("--out-dir", an_args.out_dir);

    std::string report_dir, report_out = "minfo_report.csv";
    auto* report_cmd = app.add_subcommand("report", "render the MInfo tables");
    report_cmd->add_option("--runs-dir", report_dir)->required();
    report_cmd->add_option("--out", report_out);

    PipelineArgs pipe_args;
    auto* pipe_cmd = app.add_subcommand("pipeline", "chain all stages from one config");
    pipe_cmd->add_option("--config", pipe_args.config_path);
    pipe_cmd->add_option("--seed", pipe_args.seed);
    pipe_cmd->add_option("--out-dir", pipe_args.out_dir);
    pipe_cmd->add_option("--jobs", pipe_args.jobs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << app.help();
        return 2;
    }

    const char* stage = "cli";
    try {
        if (synth_cmd->parsed()) { stage = "synth"; return run_synth(synth_args); }
        if (parse_cmd->parsed()) { stage = "parse"; return run_parse(parse_in, parse_stats); }
        if (fp_cmd->parsed()) { stage = "fingerprint"; return run_fingerprint(fp_args); }
        if (pools_cmd->parsed()) { stage = "pools"; return run_pools(pools_args); }
        if (train_cmd->parsed()) { stage = "train"; return run_train(train_args); }
        if (an_cmd->parsed()) { stage = "analyze"; return run_analyze(an_args); }
        if (report_cmd->parsed()) { stage = "report"; return run_report(report_dir, report_out); }
        if (pipe_cmd->parsed()) { stage = "pipeline"; return run_pipeline(pipe_args); }
    } catch (const std::exception& e) {
        std::cerr << "stage " << stage << " failed: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
