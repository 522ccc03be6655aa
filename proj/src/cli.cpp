#include "imprint/cli.hpp"

#include <CLI11.hpp>

#include <map>
#include <ostream>
#include <set>

#include "imprint/enrollment.hpp"
#include "imprint/error.hpp"
#include "imprint/experiment.hpp"
#include "imprint/fileio.hpp"
#include "text.hpp"

namespace fs = std::filesystem;

namespace imprint {

namespace {

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Long flags mirroring every config key, layered over an optional file.
struct ConfigOptions {
    std::string config_path;
    std::map<std::string, std::string> values;
    bool force = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        for (const auto& key : ExperimentConfig::keys()) {
            if (key == "force") continue;
            cmd->add_option("--" + key, values[key], "override config key '" + key + "'");
        }
        cmd->add_flag("--force", force, "overwrite existing outputs");
    }

    ExperimentConfig build(CLI::App* cmd) const {
        ExperimentConfig config;
        try {
            if (!config_path.empty()) {
                for (const auto& [k, v] : parse_config_lines(read_file(config_path))) config.set(k, v);
            }
            for (const auto& [k, v] : values) {
                if (cmd->count("--" + k) > 0) config.set(k, v);
            }
            if (force) config.force = true;
            config.validate();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return config;
    }
};

std::string chip_name(std::size_t index) { return "chip_" + std::to_string(index + 1); }

bool has_entries(const fs::path& dir) { return fs::exists(dir) && !fs::is_empty(dir); }

void refuse_overwrite(const fs::path& path, bool force) {
    if (!force && fs::exists(path)) {
        throw UsageError("'" + path.string() + "' already exists; pass --force to overwrite");
    }
}

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

fs::path with_suffix(const std::string& prefix, const std::string& suffix) { return fs::path(prefix + suffix); }

void write_outputs(const std::string& prefix, const RecoveredData& rd, const MetricsReport& report) {
    const auto pgm = with_suffix(prefix, ".pgm");
    ensure_parent(pgm);
    save_ternary_pgm(rd, pgm);
    write_file_atomic(with_suffix(prefix, ".metrics"), format_metrics_report(report));
}

MetricsReport make_report(const RecoveredData& rd, const std::optional<BinaryImage>& truth, const std::string& hours,
                          std::size_t chips) {
    MetricsReport r;
    r.rows = rd.rows();
    r.cols = rd.cols();
    r.hours = hours;
    r.chips = chips;
    r.metrics = truth ? compute_metrics(rd, *truth) : coverage_metrics(rd);
    return r;
}

Threshold threshold_for(std::int32_t requested, std::size_t trials) {
    if (requested < 0) throw UsageError("threshold must be positive");
    if (requested > 0 && static_cast<std::size_t>(requested) > trials) {
        throw UsageError("threshold " + std::to_string(requested) + " exceeds M=" + std::to_string(trials));
    }
    return requested > 0 ? Threshold(requested) : Threshold::for_trials(trials);
}

std::string check_hours_label(const std::string& hours) {
    if (hours.empty() || hours.find_first_of(" \t\r\n=") != std::string::npos) {
        throw UsageError("--hours must be a single token");
    }
    return hours;
}

// --- gen-chips ------------------------------------------------------------

void cmd_gen_chips(const ExperimentConfig& config, std::ostream& out) {
    const fs::path root = config.out;
    if (has_entries(root) && !config.force) {
        throw UsageError("output directory '" + root.string() + "' is not empty; pass --force to overwrite");
    }
    fs::create_directories(root / "chips");
    fs::create_directories(root / "ipu");

    Database db(default_window(config.fingerprint_bits, config.rows * config.cols), config.rows, config.cols,
                config.trials);
    for (std::size_t k = 0; k < config.chips; ++k) {
        const auto name = chip_name(k);
        const auto chip = generate_chip(config, k);
        save_chip(chip, root / "chips" / (name + ".chip"));
        const auto ipu = power_up(chip, config.trials, config.ipu_seed(k), name);
        save_dump(ipu, root / "ipu" / (name + ".dump"));
        db.enroll(make_record(db, name, ipu, config.created));
        const auto stable = stable_fraction(classify_stability(ipu));
        out << name << "\tstable=" << text::format_fixed(stable, 4) << "\n";
    }
    save_database(db, root / "enroll.db");
    out << "enrolled " << config.chips << " chips in " << (root / "enroll.db").string() << "\n";
}

// --- age --------------------------------------------------------------------

void cmd_age(const ExperimentConfig& config, std::ostream& out) {
    const fs::path root = config.out;
    if (!config.force && (has_entries(root / "fpu") || has_entries(root / "aged"))) {
        throw UsageError("'" + root.string() + "' already holds aged outputs; pass --force to overwrite");
    }
    const auto content = load_content(config);
    const auto model = config.aging_model();
    fs::create_directories(root / "aged");
    fs::create_directories(root / "fpu");

    out << "aging amplitude=" << text::format_double(model.amplitude)
        << " exponent=" << text::format_double(model.exponent) << "\n";
    for (std::size_t k = 0; k < config.chips; ++k) {
        const auto name = chip_name(k);
        auto chip = load_chip(root / "chips" / (name + ".chip"));
        double age = chip.age_hours();
        for (std::size_t c = 0; c < config.hours.size(); ++c) {
            if (config.hours[c] < age) {
                throw Error(Errc::invalid_argument, "checkpoint " + text::format_double(config.hours[c]) +
                                                        " h precedes chip age " + text::format_double(age) + " h");
            }
            chip = age_chip(chip, content, config.hours[c] - age, model);
            age = config.hours[c];
            const auto tag = name + "_" + checkpoint_tag(config.hours[c]);
            save_chip(chip, root / "aged" / (tag + ".chip"));
            save_dump(power_up(chip, config.trials, config.fpu_seed(k, c), tag), root / "fpu" / (tag + ".dump"));
            out << tag << "\n";
        }
    }
}

// --- recover ----------------------------------------------------------------

struct RecoverOptions {
    std::string ipu;
    std::string fpu;
    std::int32_t threshold = 0;
    std::string out;
    std::string truth;
    std::string hours = "NA";
    bool force = false;
};

void cmd_recover(const RecoverOptions& o, std::ostream& out) {
    check_hours_label(o.hours);
    refuse_overwrite(with_suffix(o.out, ".pgm"), o.force);
    const auto ipu = load_dump(o.ipu);
    const auto fpu = load_dump(o.fpu);
    const auto th = threshold_for(o.threshold, ipu.trials());
    const auto rd = hypothesis_to_ternary(partial_retrieve(ipu, fpu, th));
    std::optional<BinaryImage> truth;
    if (!o.truth.empty()) truth = load_pbm(o.truth);
    const auto report = make_report(rd, truth, o.hours, 1);
    write_outputs(o.out, rd, report);
    out << "recovery_rate=" << text::format_fixed(report.metrics.recovery_rate, 6);
    if (truth) out << " accuracy=" << text::format_fixed(report.metrics.accuracy, 6);
    out << "\n";
}

// --- recover-multi ------------------------------------------------------------

struct RecoverMultiOptions {
    std::string db;
    std::vector<std::string> dumps;
    std::vector<std::string> pairs;
    std::int32_t threshold = 0;
    double tau = kDefaultMatchTau;
    std::string out;
    std::string truth;
    std::string hours = "NA";
    bool force = false;
};

void cmd_recover_multi(const RecoverMultiOptions& o, std::ostream& out) {
    check_hours_label(o.hours);
    if (!(o.tau > 0.0 && o.tau < 0.5)) throw UsageError("--tau must lie in (0, 0.5)");
    refuse_overwrite(with_suffix(o.out, ".pgm"), o.force);

    std::map<std::string, std::string> explicit_ids;
    for (const auto& p : o.pairs) {
        const auto eq = p.rfind('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == p.size()) {
            throw UsageError("--pair expects DUMP=ID, got '" + p + "'");
        }
        explicit_ids[p.substr(0, eq)] = p.substr(eq + 1);
    }
    auto paired_id = [&](const std::string& path) -> const std::string* {
        for (const auto& key : {path, fs::path(path).filename().string()}) {
            if (auto it = explicit_ids.find(key); it != explicit_ids.end()) return &it->second;
        }
        return nullptr;
    };

    const auto db = load_database(o.db);
    const auto th = threshold_for(o.threshold, db.trials());
    std::vector<HypothesisArray> hypotheses;
    std::map<std::string, std::string> used;  // record id -> dump path
    for (const auto& path : o.dumps) {
        const auto fpu = load_dump(path);
        const EnrollmentRecord* record = nullptr;
        std::string how;
        if (const auto* id = paired_id(path)) {
            record = db.find(*id);
            if (!record) throw Error(Errc::not_found, "dump '" + path + "' is paired with unknown id '" + *id + "'");
            how = "paired";
        } else {
            const auto m = match(db, fpu, o.tau);
            if (!m.record) {
                throw Error(Errc::not_found, "dump '" + path + "' matches no enrolled chip (nearest distance " +
                                                 text::format_fixed(m.fractional_hamming, 4) + ")");
            }
            record = &db.records()[*m.record];
            how = "distance=" + text::format_fixed(m.fractional_hamming, 4);
        }
        if (auto [it, fresh] = used.emplace(record->id_label, path); !fresh) {
            throw Error(Errc::duplicate_id, "dumps '" + it->second + "' and '" + path + "' both map to '" +
                                                record->id_label + "'");
        }
        out << path << "\t" << record->id_label << "\t" << how << "\n";
        hypotheses.push_back(partial_retrieve(record->ipu_counts, fpu, th));
    }

    std::optional<BinaryImage> truth;
    if (!o.truth.empty()) truth = load_pbm(o.truth);
    for (std::size_t n = 1; n <= hypotheses.size(); ++n) {
        const auto rd = majority_vote(std::span<const HypothesisArray>(hypotheses.data(), n));
        const auto report = make_report(rd, truth, o.hours, n);
        write_outputs(o.out + "_n" + std::to_string(n), rd, report);
        if (n == hypotheses.size()) {
            write_outputs(o.out, rd, report);
            out << "chips=" << n << " recovery_rate=" << text::format_fixed(report.metrics.recovery_rate, 6);
            if (truth) out << " accuracy=" << text::format_fixed(report.metrics.accuracy, 6);
            out << "\n";
        }
    }
}

// --- enroll / match ---------------------------------------------------------

struct EnrollOptions {
    std::string db;
    std::string ipu;
    std::string id;
    std::string created = "1970-01-01T00:00:00Z";
    std::size_t fingerprint_bits = kDefaultFingerprintBits;
};

void cmd_enroll(const EnrollOptions& o, std::ostream& out) {
    const auto ipu = load_dump(o.ipu);
    if (ipu.trials() > kMaxDatabaseTrials) throw UsageError("database records need M <= 255");
    std::optional<Database> db;
    if (fs::exists(o.db)) {
        db = load_database(o.db);
    } else {
        if (o.fingerprint_bits == 0 || o.fingerprint_bits > ipu.cells()) {
            throw UsageError("--fingerprint_bits must lie in [1, " + std::to_string(ipu.cells()) + "]");
        }
        db.emplace(default_window(o.fingerprint_bits, ipu.cells()), ipu.rows(), ipu.cols(), ipu.trials());
    }
    const auto id = o.id.empty() ? ipu.label() : o.id;
    db->enroll(make_record(*db, id, ipu, o.created));
    ensure_parent(o.db);
    save_database(*db, o.db);
    out << "enrolled " << id << " (" << db->records().size() << " records)\n";
}

void cmd_match(const std::string& db_path, const std::string& fpu_path, double tau, std::ostream& out) {
    if (!(tau > 0.0 && tau < 0.5)) throw UsageError("--tau must lie in (0, 0.5)");
    const auto db = load_database(db_path);
    const auto m = match(db, load_dump(fpu_path), tau);
    out << (m.record ? db.records()[*m.record].id_label : std::string("none")) << "\t"
        << text::format_fixed(m.fractional_hamming, 6) << "\n";
}

// --- report -------------------------------------------------------------------

void cmd_report(const std::vector<std::string>& files, const std::string& out_path, bool force, std::ostream& out) {
    std::vector<MetricsReport> reports;
    for (const auto& f : files) reports.push_back(parse_metrics_report(read_file(f)));
    const auto table = format_report_table(reports);
    if (out_path.empty()) {
        out << table;
    } else {
        refuse_overwrite(out_path, force);
        ensure_parent(out_path);
        write_file_atomic(out_path, table);
    }
}

// --- experiment -----------------------------------------------------------------

void cmd_experiment(const ExperimentConfig& config, std::ostream& out) {
    const fs::path root = config.out;
    if (has_entries(root) && !config.force) {
        throw UsageError("output directory '" + root.string() + "' is not empty; pass --force to overwrite");
    }
    const auto content = load_content(config);
    const auto result = run_experiment(config, content);
    fs::create_directories(root);
    std::vector<MetricsReport> reports;
    for (std::size_t c = 0; c < config.hours.size(); ++c) {
        for (std::size_t n = 1; n <= config.chips; ++n) {
            const auto& point = result.at(c, n);
            MetricsReport r{config.rows, config.cols, text::format_double(point.hours), n, point.metrics};
            write_outputs((root / (checkpoint_tag(point.hours) + "_n" + std::to_string(n))).string(),
                          result.rd[c][n - 1], r);
            reports.push_back(r);
        }
    }
    const auto table = format_report_table(reports);
    write_file_atomic(root / "report.tsv", table);
    out << table;
}

}  // namespace

std::string format_metrics_report(const MetricsReport& r) {
    const auto& m = r.metrics;
    std::string s = "IMPRINT-METRICS v1\n";
    auto kv = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    kv("rows", std::to_string(r.rows));
    kv("cols", std::to_string(r.cols));
    kv("hours", r.hours);
    kv("chips", std::to_string(r.chips));
    kv("total_cells", std::to_string(m.total_cells));
    kv("determinate_count", std::to_string(m.determinate_count));
    kv("recovery_rate", text::format_fixed(m.recovery_rate, 6));
    kv("has_truth", m.has_truth ? "1" : "0");
    if (m.has_truth) {
        kv("correct_count", std::to_string(m.correct_count));
        kv("accuracy", text::format_fixed(m.accuracy, 6));
        kv("accuracy_vacuous", m.accuracy_vacuous ? "1" : "0");
        kv("confusion_rd0_truth0", std::to_string(m.confusion[0][0]));
        kv("confusion_rd0_truth1", std::to_string(m.confusion[0][1]));
        kv("confusion_rd1_truth0", std::to_string(m.confusion[1][0]));
        kv("confusion_rd1_truth1", std::to_string(m.confusion[1][1]));
    }
    return s;
}

MetricsReport parse_metrics_report(const std::string& contents) {
    const auto lines = text::lines(contents);
    if (lines.empty() || lines[0] != "IMPRINT-METRICS v1") {
        throw Error(Errc::malformed_header, "expected 'IMPRINT-METRICS v1'");
    }
    std::map<std::string, std::string, std::less<>> kv;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto eq = lines[i].find('=');
        if (eq == std::string_view::npos) throw Error(Errc::malformed_header, "metrics line is not key=value");
        kv[std::string(lines[i].substr(0, eq))] = std::string(lines[i].substr(eq + 1));
    }
    auto get = [&](std::string_view key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(Errc::truncated, "metrics file lacks '" + std::string(key) + "'");
        return it->second;
    };
    auto count = [&](std::string_view key) { return text::parse_u64(get(key), key, Errc::bad_digit); };

    MetricsReport r;
    r.rows = count("rows");
    r.cols = count("cols");
    r.hours = get("hours");
    r.chips = count("chips");
    auto& m = r.metrics;
    m.total_cells = count("total_cells");
    m.determinate_count = count("determinate_count");
    m.recovery_rate = text::parse_double(get("recovery_rate"), "recovery_rate", Errc::bad_digit);
    m.has_truth = get("has_truth") == "1";
    m.accuracy_vacuous = m.determinate_count == 0;
    if (m.has_truth) {
        m.correct_count = count("correct_count");
        m.accuracy = text::parse_double(get("accuracy"), "accuracy", Errc::bad_digit);
        m.accuracy_vacuous = get("accuracy_vacuous") == "1";
        m.confusion[0][0] = count("confusion_rd0_truth0");
        m.confusion[0][1] = count("confusion_rd0_truth1");
        m.confusion[1][0] = count("confusion_rd1_truth0");
        m.confusion[1][1] = count("confusion_rd1_truth1");
    }
    if (m.total_cells != r.rows * r.cols || m.determinate_count > m.total_cells) {
        throw Error(Errc::dimension_mismatch, "metrics counts are inconsistent with rows x cols");
    }
    return r;
}

std::string format_report_table(const std::vector<MetricsReport>& reports) {
    std::string s = "hours\tchips\trecovery_rate\taccuracy\n";
    for (const auto& r : reports) {
        if (r.rows != reports.front().rows || r.cols != reports.front().cols) {
            throw Error(Errc::dimension_mismatch, "metrics files disagree on dimensions (" +
                                                      std::to_string(reports.front().rows) + "x" +
                                                      std::to_string(reports.front().cols) + " vs " +
                                                      std::to_string(r.rows) + "x" + std::to_string(r.cols) + ")");
        }
        s += r.hours + "\t" + std::to_string(r.chips) + "\t" + text::format_fixed(r.metrics.recovery_rate, 6) + "\t" +
             (r.metrics.has_truth ? text::format_fixed(r.metrics.accuracy, 6) : std::string("NA")) + "\n";
    }
    return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Data remanence recovery from aged SRAM power-up states", "imprint"};
    app.require_subcommand(1);

    ConfigOptions gen_opts;
    auto* gen = app.add_subcommand("gen-chips", "generate chips, IPU dumps and the enrollment database");
    gen_opts.attach(gen);

    ConfigOptions age_opts;
    auto* age = app.add_subcommand("age", "age generated chips with the content image and dump FPU states");
    age_opts.attach(age);

    ConfigOptions exp_opts;
    auto* exp = app.add_subcommand("experiment", "run the full aging/recovery grid in memory");
    exp_opts.attach(exp);

    RecoverOptions rec_opts;
    auto* rec = app.add_subcommand("recover", "single-chip partial retrieval");
    rec->add_option("--ipu", rec_opts.ipu, "initial power-up dump")->required();
    rec->add_option("--fpu", rec_opts.fpu, "final power-up dump")->required();
    rec->add_option("--threshold", rec_opts.threshold, "T_H (default ceil(0.3 M))");
    rec->add_option("--out", rec_opts.out, "output prefix for .pgm and .metrics")->required();
    rec->add_option("--truth", rec_opts.truth, "PBM of the aging content, for accuracy");
    rec->add_option("--hours", rec_opts.hours, "checkpoint label recorded in the metrics");
    rec->add_flag("--force", rec_opts.force, "overwrite existing outputs");

    RecoverMultiOptions multi_opts;
    auto* multi = app.add_subcommand("recover-multi", "identify, retrieve and majority-vote several chips");
    multi->add_option("--db", multi_opts.db, "enrollment database")->required();
    multi->add_option("dumps", multi_opts.dumps, "FPU dumps")->required();
    multi->add_option("--pair", multi_opts.pairs, "explicit DUMP=ID pairing (repeatable)")
        ->expected(1)
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    multi->add_option("--threshold", multi_opts.threshold, "T_H (default ceil(0.3 M))");
    multi->add_option("--tau", multi_opts.tau, "fingerprint match threshold");
    multi->add_option("--out", multi_opts.out, "output prefix")->required();
    multi->add_option("--truth", multi_opts.truth, "PBM of the aging content, for accuracy");
    multi->add_option("--hours", multi_opts.hours, "checkpoint label recorded in the metrics");
    multi->add_flag("--force", multi_opts.force, "overwrite existing outputs");

    EnrollOptions enroll_opts;
    auto* enroll = app.add_subcommand("enroll", "add an IPU dump to an enrollment database");
    enroll->add_option("--db", enroll_opts.db, "database file (created if missing)")->required();
    enroll->add_option("--ipu", enroll_opts.ipu, "initial power-up dump")->required();
    enroll->add_option("--id", enroll_opts.id, "id label (default: dump label)");
    enroll->add_option("--created", enroll_opts.created, "creation stamp stored with the record");
    enroll->add_option("--fingerprint_bits", enroll_opts.fingerprint_bits, "fingerprint length for a new database");

    std::string match_db, match_fpu;
    double match_tau = kDefaultMatchTau;
    auto* match_cmd = app.add_subcommand("match", "identify a chip from an FPU dump");
    match_cmd->add_option("--db", match_db, "enrollment database")->required();
    match_cmd->add_option("--fpu", match_fpu, "final power-up dump")->required();
    match_cmd->add_option("--tau", match_tau, "fingerprint match threshold");

    std::vector<std::string> report_files;
    std::string report_out;
    bool report_force = false;
    auto* report = app.add_subcommand("report", "tabulate metrics files");
    report->add_option("metrics", report_files, "metrics files");
    report->add_option("--out", report_out, "write the table here instead of stdout");
    report->add_flag("--force", report_force, "overwrite --out");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) {
            cmd_gen_chips(gen_opts.build(gen), out);
        } else if (*age) {
            cmd_age(age_opts.build(age), out);
        } else if (*exp) {
            cmd_experiment(exp_opts.build(exp), out);
        } else if (*rec) {
            cmd_recover(rec_opts, out);
        } else if (*multi) {
            cmd_recover_multi(multi_opts, out);
        } else if (*enroll) {
            cmd_enroll(enroll_opts, out);
        } else if (*match_cmd) {
            cmd_match(match_db, match_fpu, match_tau, out);
        } else if (*report) {
            cmd_report(report_files, report_out, report_force, out);
        }
    } catch (const UsageError& e) {
        err << "imprint: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "imprint: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == Errc::invalid_argument ? kExitUsage : kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "imprint: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace imprint
