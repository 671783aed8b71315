#include "cli.hpp"

#include "hiercode/codebook.hpp"
#include "hiercode/codebook_io.hpp"
#include "hiercode/error.hpp"
#include "hiercode/ids.hpp"
#include "hiercode/losses.hpp"
#include "hiercode/similarity.hpp"
#include "hiercode/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace hiercode::cli {

namespace {

using nlohmann::json;

constexpr const char* kFormats = R"(File formats:
  IDS file         UTF-8 text, one record per line: <character> TAB <IDS>.
                   Lines starting with '#' and blank lines are ignored. The IDS
                   is prefix notation over U+2FF0..U+2FFB; ⿲ and ⿳ are rewritten
                   to nested binary structures. Spaces inside an IDS are ignored.
  Prototype file   One radical per line: <radical> TAB <L_R symbols, each + or ->.
                   '#' lines and blank lines are ignored.
  Frames file      TSV, one frame per line, t tab- or space-separated decimal
                   numbers. '#' lines and blank lines are ignored.
  Codebook file    Binary: "HCBK", version 1, flags, parameters, seed,
                   labels, decompositions, radical table, packed code rows
                   (2 bits per trit: 00=0, 01=+1, 10=-1), blank row and a
                   trailing FNV-1a 64 checksum; little-endian throughout.
Exit status: 0 success, 1 validation or domain error, 2 I/O error.
The seed defaults to $HIERCODE_SEED when set; --seed overrides it.)";

struct ParamFlags {
    CodeParams params;
    std::uint64_t seed = 1;
    std::size_t min_hamming = 1;
};

void add_params(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("-D,--depth", f.params.depth, "full-tree depth D")->capture_default_str();
    cmd->add_option("-S,--struct-bits", f.params.struct_bits, "structure code length L_S")->capture_default_str();
    cmd->add_option("-R,--radical-bits", f.params.radical_bits, "radical code length L_R")->capture_default_str();
    cmd->add_option("-M,--max-radicals", f.params.max_radicals, "radical positions M")->capture_default_str();
    cmd->add_option("--min-hamming", f.min_hamming, "minimum pairwise Hamming distance of generated radical codes")
        ->capture_default_str();
}

void add_seed(CLI::App* cmd, std::uint64_t& seed) {
    cmd->add_option("--seed", seed, "random seed")->envname("HIERCODE_SEED")->capture_default_str();
}

std::string code_string(std::span<const Trit> code) {
    std::string s(code.size(), '0');
    for (std::size_t i = 0; i < code.size(); ++i) s[i] = code[i] > 0 ? '+' : code[i] < 0 ? '-' : '0';
    return s;
}

json params_json(const CodeParams& p) {
    return {{"D", p.depth}, {"L_S", p.struct_bits}, {"L_R", p.radical_bits}, {"M", p.max_radicals},
            {"t", p.code_length()}};
}

json synth_json(const SynthConfig& c) {
    return {{"noise_sigma", c.noise_sigma}, {"flip_rate", c.flip_rate}, {"frames_per_char", c.frames_per_char},
            {"blank_prob", c.blank_prob},   {"seed", c.seed}};
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Frames read_frames(const std::string& path, std::size_t expected) {
    const std::string text = read_text(path);
    Frames frames(expected, 0);
    std::istringstream lines(text);
    std::string line;
    std::size_t number = 0;
    std::vector<double> values;
    while (std::getline(lines, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        values.clear();
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == '\t' || *p == ' ')) ++p;
            if (p == end) break;
            if (*p == '+') ++p;
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc() || (next < end && *next != '\t' && *next != ' ')) {
                throw Error(ErrorCode::BadFormat, path + ":" + std::to_string(number) + ": not a number");
            }
            values.push_back(v);
            p = next;
        }
        if (values.size() != expected) {
            throw Error(ErrorCode::DimensionMismatch, path + ":" + std::to_string(number) + ": frame has " +
                                                          std::to_string(values.size()) +
                                                          " values, codebook expects t=" + std::to_string(expected));
        }
        frames.push_back(std::span<const double>(values));
    }
    return frames;
}

struct Output {
    std::string format = "json";
    std::string report;
};

void add_output(CLI::App* cmd, Output& o) {
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "tsv"}))->capture_default_str();
    cmd->add_option("--report", o.report, "write the report to this path instead of stdout");
}

void emit(const Output& o, const json& report, const std::string& tsv, std::ostream& out) {
    const std::string body = o.format == "tsv" ? tsv : report.dump(2) + "\n";
    if (o.report.empty()) {
        out << body;
        return;
    }
    std::ofstream f(o.report, std::ios::binary);
    if (!f || !(f << body)) throw Error(ErrorCode::Io, "cannot write " + o.report);
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

Codebook codebook_from_flags(const std::string& ids, const std::string& prototypes, const ParamFlags& f,
                             std::size_t synthetic, std::size_t radicals, std::size_t max_depth) {
    f.params.check();
    std::vector<CodebookEntry> entries;
    if (!ids.empty()) {
        for (IdsEntry& e : load_ids_file(ids)) entries.push_back({std::move(e.character), std::move(e.tree)});
    } else if (synthetic > 0) {
        entries = synthetic_charset({radicals, synthetic, max_depth, f.seed});
    } else {
        throw Error(ErrorCode::InvalidParams, "give --ids or --synthetic");
    }
    if (!prototypes.empty()) {
        return build_codebook(std::move(entries), load_prototype_codes(prototypes, f.params.radical_bits), f.params,
                              f.seed);
    }
    return build_codebook(std::move(entries), f.params, f.seed, f.min_hamming);
}

json margins_json(const DecodeMargins& m) {
    return {{"min_gap", m.min_gap}, {"min_strict_gap", m.min_strict_gap}, {"tied_pairs", m.tied_pairs}};
}

std::vector<std::size_t> parse_list(const std::vector<std::size_t>& v, std::size_t fallback) {
    return v.empty() ? std::vector<std::size_t>{fallback} : v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"HierCode: hierarchical multi-hot codebooks for Chinese characters"};
    app.footer(kFormats);
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    // build-codebook
    ParamFlags build_flags;
    std::string build_ids, build_proto, build_out;
    std::size_t build_synth = 0, build_radicals = 40, build_depth = 3;
    Output build_output;
    auto* build = app.add_subcommand("build-codebook", "build a codebook file from an IDS file");
    build->add_option("--ids", build_ids, "IDS file");
    build->add_option("--prototypes", build_proto, "radical code file replacing generated codes");
    build->add_option("--synthetic", build_synth, "build a synthetic charset of this size instead of --ids");
    build->add_option("--synthetic-radicals", build_radicals, "radicals in the synthetic charset")->capture_default_str();
    build->add_option("--synthetic-depth", build_depth, "tree depth of the synthetic charset")->capture_default_str();
    build->add_option("-o,--out", build_out, "codebook file to write")->required();
    add_params(build, build_flags);
    add_seed(build, build_flags.seed);
    add_output(build, build_output);
    build->footer(kFormats);

    // encode
    std::string enc_codebook, enc_char, enc_ids;
    Output enc_output;
    auto* encode = app.add_subcommand("encode", "print the code of a character or of any IDS");
    encode->add_option("-c,--codebook", enc_codebook, "codebook file")->required();
    auto* enc_char_opt = encode->add_option("--char", enc_char, "character in the codebook");
    auto* enc_ids_opt = encode->add_option("--ids", enc_ids, "IDS to encode, need not be in the codebook");
    enc_char_opt->excludes(enc_ids_opt);
    add_output(encode, enc_output);
    encode->footer(kFormats);

    // decode
    std::string dec_codebook, dec_frames, dec_mode = "raw";
    std::size_t dec_topk = 1;
    bool dec_line = false;
    double dec_temperature = 1.0;
    Output dec_output;
    auto* decode = app.add_subcommand("decode", "decode frames against a codebook");
    decode->add_option("-c,--codebook", dec_codebook, "codebook file")->required();
    decode->add_option("-f,--frames", dec_frames, "frames TSV file")->required();
    decode->add_option("--mode", dec_mode, "raw scores, hard sign or soft tanh binarization")
        ->check(CLI::IsMember({"raw", "hard", "soft"}))
        ->capture_default_str();
    decode->add_option("--topk", dec_topk, "candidates per frame in character mode")->capture_default_str();
    decode->add_flag("--line", dec_line, "treat frames as one text line and decode by best path");
    decode->add_option("--temperature", dec_temperature, "softmax temperature")->capture_default_str();
    add_output(decode, dec_output);
    decode->footer(kFormats);

    // eval-zeroshot
    ParamFlags ez_flags;
    std::string ez_codebook, ez_ids;
    std::size_t ez_synth = 1000, ez_radicals = 40, ez_depth = 3, ez_trials = 2000, ez_line_length = 0;
    std::vector<std::size_t> ez_m;
    double ez_fraction = 0.6, ez_temperature = 1.0;
    SynthConfig ez_config;
    Output ez_output;
    auto* ez = app.add_subcommand("eval-zeroshot", "zero-shot character and line evaluation");
    ez->add_option("-c,--codebook", ez_codebook, "codebook file (default: a synthetic charset)");
    ez->add_option("--ids", ez_ids, "IDS file to build the codebook from");
    ez->add_option("--synthetic", ez_synth, "synthetic charset size")->capture_default_str();
    ez->add_option("--synthetic-radicals", ez_radicals, "radicals in the synthetic charset")->capture_default_str();
    ez->add_option("--synthetic-depth", ez_depth, "tree depth of the synthetic charset")->capture_default_str();
    ez->add_option("-m,--seen", ez_m, "seen class counts m (repeatable)");
    ez->add_option("--seen-fraction", ez_fraction, "seen fraction when -m is absent")->capture_default_str();
    ez->add_option("--trials", ez_trials, "samples per m")->capture_default_str();
    ez->add_option("--flip-rate", ez_config.flip_rate, "sign-flip probability per nonzero trit")->capture_default_str();
    ez->add_option("--sigma", ez_config.noise_sigma, "Gaussian noise std-dev")->capture_default_str();
    ez->add_option("--frames-per-char", ez_config.frames_per_char, "frames per character in lines")
        ->capture_default_str();
    ez->add_option("--blank-prob", ez_config.blank_prob, "blank frame probability between characters")
        ->capture_default_str();
    ez->add_option("--line-length", ez_line_length, "also evaluate text lines of this length")->capture_default_str();
    ez->add_option("--temperature", ez_temperature, "softmax temperature for line decoding")->capture_default_str();
    add_params(ez, ez_flags);
    add_seed(ez, ez_flags.seed);
    add_output(ez, ez_output);

    // sweep
    SynthConfig sw_config;
    sw_config.flip_rate = 0.15;
    std::uint64_t sw_seed = 1;
    std::size_t sw_synth = 1000, sw_radicals = 40, sw_depth = 3, sw_trials = 4000;
    std::vector<std::size_t> sw_lr, sw_ls, sw_d, sw_mh;
    std::string sw_ids;
    Output sw_output;
    auto* sweep = app.add_subcommand("sweep", "ablation sweep over D, L_S, L_R and code generation");
    sweep->add_option("--ids", sw_ids, "IDS file for the fixed charset (default: synthetic)");
    sweep->add_option("--synthetic", sw_synth, "synthetic charset size")->capture_default_str();
    sweep->add_option("--synthetic-radicals", sw_radicals, "radicals in the synthetic charset")->capture_default_str();
    sweep->add_option("--synthetic-depth", sw_depth, "tree depth of the synthetic charset")->capture_default_str();
    sweep->add_option("--radical-bits", sw_lr, "L_R values (repeatable)");
    sweep->add_option("--struct-bits", sw_ls, "L_S values (repeatable)");
    sweep->add_option("--depth", sw_d, "D values (repeatable)");
    sweep->add_option("--min-hamming", sw_mh, "min Hamming values for generated radical codes (repeatable)");
    sweep->add_option("--trials", sw_trials, "samples per grid point")->capture_default_str();
    sweep->add_option("--flip-rate", sw_config.flip_rate, "sign-flip probability per nonzero trit")
        ->capture_default_str();
    sweep->add_option("--sigma", sw_config.noise_sigma, "Gaussian noise std-dev")->capture_default_str();
    add_seed(sweep, sw_seed);
    add_output(sweep, sw_output);

    // stats
    std::string st_codebook;
    std::size_t st_feature_dim = 512, st_classes = 3755;
    bool st_bias = false;
    double st_target = 0.926;
    ParamFlags st_flags;
    Output st_output;
    auto* stats = app.add_subcommand("stats", "classification-layer compression statistics");
    stats->add_option("-c,--codebook", st_codebook, "codebook file (default: code length from the parameters)");
    stats->add_option("--feature-dim", st_feature_dim, "input width of the classification layer")
        ->capture_default_str();
    stats->add_option("--classes", st_classes, "one-hot class count N")->capture_default_str();
    stats->add_flag("--bias", st_bias, "count a bias per output");
    stats->add_option("--target-ratio", st_target, "ratio to solve N for")->capture_default_str();
    add_params(stats, st_flags);
    add_output(stats, st_output);

    // ctc-check
    CtcCheckConfig cc_config;
    Output cc_output;
    auto* ctc = app.add_subcommand("ctc-check", "verify the CTC and CE similarity losses");
    ctc->add_option("--oracle-instances", cc_config.oracle_instances, "brute-force comparisons")
        ->capture_default_str();
    ctc->add_option("--gradient-instances", cc_config.gradient_instances, "finite-difference checks")
        ->capture_default_str();
    add_seed(ctc, cc_config.seed);
    add_output(ctc, cc_output);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*build) {
            const Codebook cb = codebook_from_flags(build_ids, build_proto, build_flags, build_synth, build_radicals,
                                                    build_depth);
            save_codebook(cb, build_out);
            const DecodeMargins m = decode_margins(cb);
            json report{{"codebook", build_out},
                        {"N", cb.size()},
                        {"params", params_json(cb.params())},
                        {"seed", cb.seed()},
                        {"radicals", cb.radicals().size()},
                        {"radical_min_hamming", cb.radicals().min_hamming_distance()},
                        {"margins", margins_json(m)},
                        {"collisions", 0}};
            std::string tsv = "N\tt\tradicals\tmin_gap\tmin_strict_gap\ttied_pairs\tcollisions\n" +
                              std::to_string(cb.size()) + "\t" + std::to_string(cb.code_length()) + "\t" +
                              std::to_string(cb.radicals().size()) + "\t" + std::to_string(m.min_gap) + "\t" +
                              std::to_string(m.min_strict_gap) + "\t" + std::to_string(m.tied_pairs) + "\t0\n";
            emit(build_output, report, tsv, out);
        } else if (*encode) {
            const Codebook cb = load_codebook(enc_codebook);
            json report;
            std::vector<Trit> code;
            if (!enc_char.empty()) {
                const auto i = cb.index_of(enc_char);
                if (!i) throw Error(ErrorCode::BadLabel, "character " + enc_char + " not in " + enc_codebook);
                code.assign(cb.row(*i).begin(), cb.row(*i).end());
                report = {{"character", enc_char}, {"index", *i}, {"ids", render(cb.tree(*i))}};
            } else if (!enc_ids.empty()) {
                const DecompTree tree = parse_ids(enc_ids);
                code = cb.encode(tree);
                report = {{"ids", render(tree)}};
                for (std::size_t i = 0; i < cb.size(); ++i) {
                    if (std::equal(code.begin(), code.end(), cb.row(i).begin())) report["character"] = cb.label(i);
                }
            } else {
                throw Error(ErrorCode::InvalidParams, "give --char or --ids");
            }
            report["code"] = code_string(code);
            report["weight"] = std::count_if(code.begin(), code.end(), [](Trit v) { return v != 0; });
            emit(enc_output, report, code_string(code) + "\n", out);
        } else if (*decode) {
            const Codebook cb = load_codebook(dec_codebook);
            Frames frames = read_frames(dec_frames, cb.code_length());
            if (dec_mode == "hard") frames = binarize(frames, BinarizeMode::Hard);
            if (dec_mode == "soft") frames = binarize(frames, BinarizeMode::Soft);
            json report{{"mode", dec_mode}, {"frames", frames.count()}};
            std::string tsv;
            if (dec_line) {
                const auto labels = best_path_decode(cb, frames, dec_temperature);
                std::string text;
                json indices = json::array();
                for (std::size_t k : labels) {
                    text += cb.label(k);
                    indices.push_back(k);
                }
                report["transcript"] = text;
                report["indices"] = indices;
                tsv = text + "\n";
            } else {
                json rows = json::array();
                tsv = "frame\trank\tcharacter\tindex\tscore\n";
                for (std::size_t w = 0; w < frames.count(); ++w) {
                    json cands = json::array();
                    const auto best = topk(cb, frames.frame(w), dec_topk);
                    for (std::size_t r = 0; r < best.size(); ++r) {
                        cands.push_back({{"character", cb.label(best[r].index)},
                                         {"index", best[r].index},
                                         {"score", best[r].score}});
                        tsv += std::to_string(w) + "\t" + std::to_string(r + 1) + "\t" + cb.label(best[r].index) +
                               "\t" + std::to_string(best[r].index) + "\t" + fmt(best[r].score) + "\n";
                    }
                    rows.push_back(cands);
                }
                report["results"] = rows;
            }
            emit(dec_output, report, tsv, out);
        } else if (*ez) {
            ez_config.seed = ez_flags.seed;
            ez_config.check();
            const Codebook cb = !ez_codebook.empty()
                                    ? load_codebook(ez_codebook)
                                    : codebook_from_flags(ez_ids, "", ez_flags, ez_ids.empty() ? ez_synth : 0,
                                                          ez_radicals, ez_depth);
            std::vector<ZeroShotSplit> splits;
            if (ez_m.empty()) {
                splits.push_back(split_by_fraction(cb, ez_fraction));
            } else {
                for (std::size_t m : ez_m) splits.emplace_back(cb, m);
            }
            const auto start = std::chrono::steady_clock::now();
            json per_m = json::array();
            std::string tsv = "m\ttrials\taccuracy\tpredicted_seen";
            if (ez_line_length > 0) tsv += "\tline_exact\tAR\tCR";
            tsv += "\n";
            for (const ZeroShotSplit& split : splits) {
                const CharEvalReport r = eval_zero_shot_char(cb, split, ez_config, ez_trials);
                json confusions = json::array();
                for (const Confusion& c : r.top_confusions) {
                    confusions.push_back({{"truth", cb.label(c.truth)},
                                          {"predicted", cb.label(c.predicted)},
                                          {"count", c.count}});
                }
                json entry{{"m", r.m},
                           {"unseen", split.unseen_count()},
                           {"trials", r.trials},
                           {"correct", r.correct},
                           {"accuracy", r.accuracy},
                           {"errors_on_seen_labels", r.predicted_seen},
                           {"top_confusions", confusions}};
                tsv += std::to_string(r.m) + "\t" + std::to_string(r.trials) + "\t" + fmt(r.accuracy) + "\t" +
                       std::to_string(r.predicted_seen);
                if (ez_line_length > 0) {
                    const LineEvalReport l =
                        eval_line_zero_shot(cb, split, ez_config, ez_line_length, ez_trials, ez_temperature);
                    entry["line"] = {{"length", l.length},
                                     {"trials", l.trials},
                                     {"exact_matches", l.exact_matches},
                                     {"exact_rate", l.exact_rate},
                                     {"Nt", l.reference_chars},
                                     {"substitutions", l.edits.substitutions},
                                     {"deletions", l.edits.deletions},
                                     {"insertions", l.edits.insertions},
                                     {"CR", l.correct_rate},
                                     {"AR", l.accuracy_rate},
                                     {"mean_normalized_edit_distance", l.mean_normalized_distance}};
                    tsv += "\t" + fmt(l.exact_rate) + "\t" + fmt(l.accuracy_rate) + "\t" + fmt(l.correct_rate);
                }
                tsv += "\n";
                per_m.push_back(entry);
            }
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            err << "eval-zeroshot: " << std::fixed << std::setprecision(3) << seconds << " s\n";
            json report{{"config", synth_json(ez_config)},
                        {"N", cb.size()},
                        {"params", params_json(cb.params())},
                        {"margins", margins_json(decode_margins(cb))},
                        {"metrics",
                         "CR = (Nt - De - Ds) / Nt, AR = (Nt - De - Ds - Di) / Nt (ICDAR 2013 competition "
                         "definitions; Nt reference characters, De deletions, Ds substitutions, Di insertions)"},
                        {"per_m", per_m}};
            emit(ez_output, report, tsv, out);
        } else if (*sweep) {
            sw_config.seed = sw_seed;
            std::vector<CodebookEntry> charset;
            if (!sw_ids.empty()) {
                for (IdsEntry& e : load_ids_file(sw_ids)) charset.push_back({std::move(e.character), std::move(e.tree)});
            } else {
                charset = synthetic_charset({sw_radicals, sw_synth, sw_depth, sw_seed});
            }
            std::vector<SweepPoint> grid;
            if (sw_lr.empty() && sw_ls.empty() && sw_d.empty() && sw_mh.empty()) {
                grid = default_sweep_grid();
            } else {
                const CodeParams base{};
                for (std::size_t d : parse_list(sw_d, base.depth)) {
                    for (std::size_t ls : parse_list(sw_ls, base.struct_bits)) {
                        for (std::size_t lr : parse_list(sw_lr, base.radical_bits)) {
                            for (std::size_t mh : parse_list(sw_mh, 1)) {
                                grid.push_back({CodeParams{d, ls, lr, base.max_radicals}, mh});
                            }
                        }
                    }
                }
            }
            const auto start = std::chrono::steady_clock::now();
            const auto rows = ablation_sweep(charset, grid, sw_config, sw_trials);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            err << "sweep: " << std::fixed << std::setprecision(3) << seconds << " s\n";
            json table = json::array();
            std::string tsv = "D\tL_S\tL_R\tM\tmin_hamming\tt\tradical_min_hamming\tmin_gap\tmin_strict_gap\ttied_pairs"
                              "\ttrials\taccuracy\tstd_error\n";
            for (const SweepRow& r : rows) {
                const CodeParams& p = r.point.params;
                table.push_back({{"params", params_json(p)},
                                 {"min_hamming", r.point.min_hamming},
                                 {"radical_min_hamming", r.radical_min_hamming},
                                 {"min_gap", r.min_gap},
                                 {"min_strict_gap", r.min_strict_gap},
                                 {"tied_pairs", r.tied_pairs},
                                 {"trials", r.trials},
                                 {"correct", r.correct},
                                 {"accuracy", r.accuracy},
                                 {"std_error", r.std_error}});
                tsv += std::to_string(p.depth) + "\t" + std::to_string(p.struct_bits) + "\t" +
                       std::to_string(p.radical_bits) + "\t" + std::to_string(p.max_radicals) + "\t" +
                       std::to_string(r.point.min_hamming) + "\t" + std::to_string(r.code_length) + "\t" +
                       std::to_string(r.radical_min_hamming) + "\t" + std::to_string(r.min_gap) + "\t" +
                       std::to_string(r.min_strict_gap) + "\t" + std::to_string(r.tied_pairs) + "\t" +
                       std::to_string(r.trials) + "\t" + fmt(r.accuracy) + "\t" + fmt(r.std_error) + "\n";
            }
            json report{{"config", synth_json(sw_config)}, {"charset_size", charset.size()}, {"rows", table}};
            emit(sw_output, report, tsv, out);
        } else if (*stats) {
            std::size_t t = 0;
            json report;
            if (!st_codebook.empty()) {
                const Codebook cb = load_codebook(st_codebook);
                t = cb.code_length();
                report["codebook"] = {{"path", st_codebook}, {"N", cb.size()}, {"params", params_json(cb.params())}};
            } else {
                st_flags.params.check();
                t = st_flags.params.code_length();
                report["params"] = params_json(st_flags.params);
            }
            const CompressionStats s = compression_stats(t, st_feature_dim, st_classes, st_bias);
            const double solved = classes_for_ratio(t, st_target);
            report["feature_dim"] = s.feature_dim;
            report["bias"] = s.bias;
            report["one_hot_classes"] = s.one_hot_classes;
            report["code_length"] = s.code_length;
            report["cls_params_onehot"] = s.cls_params_onehot;
            report["cls_params_multihot"] = s.cls_params_multihot;
            report["ratio"] = s.ratio;
            report["ratio_formula"] = "1 - t / N";
            report["target_ratio"] = st_target;
            report["classes_for_target_ratio"] = solved;
            report["classes_for_target_ratio_rounded"] = static_cast<std::uint64_t>(std::llround(solved));
            std::string tsv = "t\tN\tratio\ttarget_ratio\tclasses_for_target\n" + std::to_string(t) + "\t" +
                              std::to_string(st_classes) + "\t" + fmt(s.ratio) + "\t" + fmt(st_target) + "\t" +
                              fmt(solved) + "\n";
            emit(st_output, report, tsv, out);
        } else if (*ctc) {
            const auto start = std::chrono::steady_clock::now();
            const CtcCheckReport r = run_ctc_check(cc_config);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            err << "ctc-check: " << std::fixed << std::setprecision(3) << seconds << " s\n";
            json report{{"seed", cc_config.seed},
                        {"oracle", {{"instances", r.oracle_instances},
                                    {"failures", r.oracle_failures},
                                    {"max_abs_error_nats", r.max_oracle_error},
                                    {"tolerance", cc_config.oracle_tolerance}}},
                        {"gradient", {{"instances", r.gradient_instances},
                                      {"failures", r.gradient_failures},
                                      {"max_ctc_relative_error", r.max_ctc_gradient_error},
                                      {"max_ce_relative_error", r.max_ce_gradient_error},
                                      {"tolerance", cc_config.gradient_tolerance},
                                      {"step", cc_config.step}}},
                        {"passed", r.passed()}};
            std::string tsv = "check\tinstances\tfailures\tmax_error\n";
            tsv += "oracle\t" + std::to_string(r.oracle_instances) + "\t" + std::to_string(r.oracle_failures) + "\t" +
                   fmt(r.max_oracle_error) + "\n";
            tsv += "gradient\t" + std::to_string(r.gradient_instances) + "\t" + std::to_string(r.gradient_failures) +
                   "\t" + fmt(std::max(r.max_ctc_gradient_error, r.max_ce_gradient_error)) + "\n";
            emit(cc_output, report, tsv, out);
            return r.passed() ? 0 : 1;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.is_io() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace hiercode::cli
