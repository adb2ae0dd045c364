// evex: zero-shot dyadic event extraction pipeline.
//
// Subcommands wire the stages end to end or run any stage against a
// hand-authored upstream file. Every command writes a manifest; commands
// that talk to the model also write a query ledger.
//
// Exit codes: 0 success, 1 usage, 2 stage failure, 3 backend failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <evex/evaluation.hpp>
#include <evex/formats.hpp>
#include <evex/pipeline.hpp>
#include <evex/version.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

#ifndef EVEX_DEFAULT_DATA_DIR
#define EVEX_DEFAULT_DATA_DIR "data"
#endif

struct CliState {
    std::string config_path;
    evex::RunConfig config;

    void load_config() {
        if (!config_path.empty()) config = evex::RunConfig::load(config_path);
    }
};

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_stage_manifest(const std::string& command, const evex::RunConfig& cfg,
                          const std::vector<std::string>& inputs,
                          const evex::QueryLedger* ledger, const std::string& out_path) {
    evex::ManifestBuilder manifest(command);
    manifest.set_config(cfg.to_json());
    for (const auto& in : inputs) manifest.add_input(in);
    if (ledger) manifest.set_ledger(*ledger);
    manifest.write(out_path);
}

std::map<std::string, evex::EventClassSpec> spec_map(const std::string& classes_path) {
    std::map<std::string, evex::EventClassSpec> specs;
    for (auto& s : evex::load_event_classes(classes_path)) specs.emplace(s.id, s);
    return specs;
}

json score_to_json(const evex::ScoreReport& rep) {
    json per_class = json::object();
    for (const auto& [cls, c] : rep.per_class) {
        per_class[cls] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
    }
    return {{"precision", rep.precision}, {"recall", rep.recall},     {"f1", rep.f1},
            {"tp", rep.tp},               {"fp", rep.fp},             {"fn", rep.fn},
            {"per_class", per_class},     {"ignored_rows", rep.ignored_rows}};
}

void print_score_table(const evex::ScoreReport& rep, const std::string& task) {
    std::printf("%-28s %9s %9s %9s %6s %6s %6s\n", task.c_str(), "P", "R", "F1", "TP", "FP",
                "FN");
    std::printf("%-28s %9.4f %9.4f %9.4f %6ld %6ld %6ld\n", "micro", rep.precision, rep.recall,
                rep.f1, rep.tp, rep.fp, rep.fn);
    for (const auto& [cls, c] : rep.per_class) {
        const double p = c.tp + c.fp > 0 ? double(c.tp) / (c.tp + c.fp) : 0.0;
        const double r = c.tp + c.fn > 0 ? double(c.tp) / (c.tp + c.fn) : 0.0;
        const double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        std::printf("%-28s %9.4f %9.4f %9.4f %6ld %6ld %6ld\n", cls.c_str(), p, r, f1, c.tp,
                    c.fp, c.fn);
    }
}

std::string default_manifest_path(const std::string& out_file) {
    return out_file + ".manifest.json";
}

std::string default_ledger_path(const std::string& out_file) {
    return out_file + ".ledger.jsonl";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-shot dyadic event extraction pipeline"};
    app.set_version_flag("--version", evex::kVersion);
    app.require_subcommand(1);
    app.fallthrough();  // global --config may follow the subcommand name

    CliState state;
    app.add_option("--config", state.config_path, "JSON run configuration file")
        ->envname("EVEX_CONFIG");

    // defaults that point at the bundled data files
    const std::string data_dir = EVEX_DEFAULT_DATA_DIR;

    // --- run -----------------------------------------------------------------
    auto* cmd_run = app.add_subcommand("run", "full pipeline: lexicon, detect, extract, "
                                              "affiliate, graph");
    std::string run_out_dir, run_bucket = "year";
    cmd_run->add_option("--out-dir", run_out_dir, "output directory");
    cmd_run->add_option("--bucket", run_bucket, "graph time bucketing: year|month|none");

    // --- build-lexicon ---------------------------------------------------------
    auto* cmd_lex = app.add_subcommand("build-lexicon", "expand event classes into trigger-stem "
                                                        "lexicon files");
    std::string lex_classes, lex_out_dir = "lexicons";
    double lex_temp = -1.0;
    int lex_samples = -1;
    bool lex_force = false;
    cmd_lex->add_option("--classes", lex_classes, "event class spec JSON")->required();
    cmd_lex->add_option("--out-dir", lex_out_dir, "lexicon output directory");
    cmd_lex->add_option("--mc-temp", lex_temp, "expansion temperature");
    cmd_lex->add_option("--mc-samples", lex_samples, "expansion sample count");
    cmd_lex->add_flag("--force", lex_force, "rebuild even when files are fresh");

    // --- detect ----------------------------------------------------------------
    auto* cmd_detect = app.add_subcommand("detect", "stem-match and disambiguate a corpus");
    std::string det_lexicon_dir, det_corpus, det_classes, det_out = "detections.jsonl";
    double det_temp = -1.0;
    int det_samples = -1, det_workers = 0;
    cmd_detect->add_option("--lexicon-dir", det_lexicon_dir, "directory of lexicon JSON files")
        ->required();
    cmd_detect->add_option("--corpus", det_corpus, "corpus JSON-lines file")->required();
    cmd_detect->add_option("--classes", det_classes, "event class spec JSON")->required();
    cmd_detect->add_option("--out", det_out, "detections output file");
    cmd_detect->add_option("--mc-temp", det_temp, "boolean QA temperature");
    cmd_detect->add_option("--mc-samples", det_samples, "boolean QA sample count");
    cmd_detect->add_option("--workers", det_workers, "concurrent gateway requests");

    // --- baseline ----------------------------------------------------------------
    auto* cmd_baseline = app.add_subcommand("baseline", "naive exhaustive boolean querying over "
                                                        "every (sentence, class) pair");
    std::string base_corpus, base_classes, base_variant = "about",
                base_out = "baseline_detections.jsonl";
    int base_samples = -1;
    cmd_baseline->add_option("--corpus", base_corpus, "corpus JSON-lines file")->required();
    cmd_baseline->add_option("--classes", base_classes, "event class spec JSON")->required();
    cmd_baseline->add_option("--variant", base_variant,
                             "about | discusses | about+def | discusses+def");
    cmd_baseline->add_option("--out", base_out, "detections output file");
    cmd_baseline->add_option("--mc-samples", base_samples, "samples per query");

    // --- extract -----------------------------------------------------------------
    auto* cmd_extract = app.add_subcommand("extract", "dyadic argument extraction for detections");
    std::string ext_detections, ext_corpus, ext_classes, ext_out = "pairs.jsonl";
    std::string ext_policy;
    cmd_extract->add_option("--detections", ext_detections, "detections JSON-lines file")
        ->required();
    cmd_extract->add_option("--corpus", ext_corpus, "corpus JSON-lines file")->required();
    cmd_extract->add_option("--classes", ext_classes, "event class spec JSON")->required();
    cmd_extract->add_option("--modality-policy", ext_policy,
                            "normalize | past-only | include-future");
    cmd_extract->add_option("--out", ext_out, "pairs output file");

    // --- affiliate ---------------------------------------------------------------
    auto* cmd_affiliate = app.add_subcommand("affiliate", "resolve country affiliations for "
                                                          "extracted actor pairs");
    std::string aff_pairs, aff_corpus, aff_gazetteer = data_dir + "/gazetteer",
                aff_geocoder = "off", aff_geocoder_cache, aff_out = "affiliations.jsonl";
    cmd_affiliate->add_option("--pairs", aff_pairs, "pairs JSON-lines file")->required();
    cmd_affiliate->add_option("--corpus", aff_corpus, "corpus JSON-lines file")->required();
    cmd_affiliate->add_option("--gazetteer", aff_gazetteer,
                              "directory with countries.tsv, code_names.tsv, us_extensions.tsv");
    cmd_affiliate->add_option("--geocoder", aff_geocoder, "live | cache | off");
    cmd_affiliate->add_option("--geocoder-cache", aff_geocoder_cache, "geocoder cache JSON path");
    cmd_affiliate->add_option("--out", aff_out, "affiliations output file");

    // --- graph ---------------------------------------------------------------
    auto* cmd_graph = app.add_subcommand("graph", "aggregate affiliations into a dyadic "
                                                  "event-frequency edge list");
    std::string graph_affiliations, graph_bucket = "year", graph_out = "graph.csv";
    cmd_graph->add_option("--affiliations", graph_affiliations, "affiliations JSON-lines file")
        ->required();
    cmd_graph->add_option("--bucket", graph_bucket, "year | month | none");
    cmd_graph->add_option("--out", graph_out, "edge list CSV path");

    // --- evaluate ---------------------------------------------------------------
    auto* cmd_eval = app.add_subcommand("evaluate", "score predictions against a gold file");
    std::string eval_gold, eval_pred, eval_role_map = data_dir + "/role_map.json";
    std::string eval_match = "exact", eval_out = "score_report.json";
    bool eval_dyadic = false;
    cmd_eval->add_option("--gold", eval_gold, "gold JSON-lines file")->required();
    cmd_eval->add_option("--pred", eval_pred, "predictions JSON-lines file")->required();
    cmd_eval->add_flag("--dyadic", eval_dyadic, "score dyadic pairs instead of detections");
    cmd_eval->add_option("--role-map", eval_role_map, "role map JSON (dyadic scoring)");
    cmd_eval->add_option("--match-policy", eval_match, "exact | head");
    cmd_eval->add_option("--out", eval_out, "also write the report JSON here");

    // --- efficiency ---------------------------------------------------------------
    auto* cmd_eff = app.add_subcommand("efficiency", "query-budget report from a ledger");
    std::string eff_ledger, eff_dump, eff_out = "efficiency_report.json";
    long eff_classes = 0, eff_sentences = 0, eff_samples = 0;
    cmd_eff->add_option("--ledger", eff_ledger, "ledger JSON-lines file")->required();
    cmd_eff->add_option("--classes", eff_classes, "number of event classes")->required();
    cmd_eff->add_option("--sentences", eff_sentences, "number of corpus sentences")->required();
    cmd_eff->add_option("--samples", eff_samples,
                        "MC samples per boolean query (default: inferred from the ledger)");
    cmd_eff->add_option("--response-dump", eff_dump,
                        "response dump JSON-lines for the unanimity statistic");
    cmd_eff->add_option("--out", eff_out, "also write the report JSON here");

    // --- curve ---------------------------------------------------------------
    auto* cmd_curve = app.add_subcommand("curve", "cumulative synonym-set size curves per "
                                                  "temperature, optionally with recall-vs-cost "
                                                  "columns against a corpus and gold file");
    std::string curve_term, curve_definition, curve_temps = "0,0.33,0.67,1",
                curve_out = "curve.csv";
    std::string curve_corpus, curve_gold, curve_class;
    int curve_samples = 70;
    cmd_curve->add_option("--term", curve_term, "term to expand")->required();
    cmd_curve->add_option("--definition", curve_definition, "sense-pinning definition");
    cmd_curve->add_option("--temps", curve_temps, "comma-separated temperatures");
    cmd_curve->add_option("--samples", curve_samples, "draws per temperature");
    cmd_curve->add_option("--corpus", curve_corpus,
                          "corpus JSON-lines; adds match/cost columns per draw count");
    cmd_curve->add_option("--gold", curve_gold,
                          "gold JSON-lines; adds a recall column (needs --corpus)");
    cmd_curve->add_option("--class-id", curve_class,
                          "gold class to measure recall for (default: the term)");
    cmd_curve->add_option("--out", curve_out, "curve CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        state.load_config();

        if (cmd_run->parsed()) {
            if (state.config_path.empty()) throw evex::ConfigError("run requires --config");
            auto cfg = state.config;
            if (!run_out_dir.empty()) cfg.out_dir = run_out_dir;
            auto bucketing = evex::bucketing_from_string(run_bucket);
            if (!bucketing) throw evex::ConfigError("unknown bucket '" + run_bucket + "'");
            evex::Session session(cfg);
            auto outputs = evex::run_pipeline(session, *bucketing);
            print_warnings(outputs.warnings);
            std::cout << "detections:   " << outputs.detections << "\n"
                      << "pairs:        " << outputs.pairs << "\n"
                      << "affiliations: " << outputs.affiliations << "\n"
                      << "graph:        " << outputs.graph_csv << "\n"
                      << "ledger:       " << outputs.ledger << "\n"
                      << "manifest:     " << outputs.manifest << "\n";
            return 0;
        }

        if (cmd_lex->parsed()) {
            auto cfg = state.config;
            cfg.classes_path = lex_classes;
            if (lex_temp >= 0) cfg.expansion.temperature = lex_temp;
            if (lex_samples > 0) cfg.expansion.samples = lex_samples;
            evex::Session session(cfg);
            auto specs = evex::load_event_classes(lex_classes);
            auto lexicons = evex::build_lexicons(session, specs, lex_out_dir, lex_force);
            session.ledger->write_jsonl((fs::path(lex_out_dir) / "ledger.jsonl").string());
            write_stage_manifest("build-lexicon", cfg, {lex_classes}, session.ledger.get(),
                                 (fs::path(lex_out_dir) / "manifest.json").string());
            for (const auto& [id, set] : lexicons) {
                std::cout << id << ": " << set.stems.size() << " stems\n";
            }
            return 0;
        }

        if (cmd_detect->parsed()) {
            auto cfg = state.config;
            cfg.classes_path = det_classes;
            cfg.corpus_path = det_corpus;
            if (det_temp >= 0) cfg.boolean_qa.temperature = det_temp;
            if (det_samples > 0) cfg.boolean_qa.samples = det_samples;
            if (det_workers > 0) cfg.workers = det_workers;
            evex::Session session(cfg);
            auto specs = spec_map(det_classes);
            auto lexicons = evex::load_lexicon_dir(det_lexicon_dir);
            auto corpus = evex::io::load_corpus(det_corpus);
            auto run = evex::detect(session.gw(), corpus, specs, lexicons, cfg.boolean_qa,
                                    cfg.workers);
            print_warnings(run.warnings);
            evex::io::save_detections(run.detections, det_out);
            session.ledger->write_jsonl(default_ledger_path(det_out));
            write_stage_manifest("detect", cfg, {det_classes, det_corpus}, session.ledger.get(),
                                 default_manifest_path(det_out));
            std::cout << run.detections.size() << " detections -> " << det_out << "\n";
            return 0;
        }

        if (cmd_baseline->parsed()) {
            auto cfg = state.config;
            cfg.classes_path = base_classes;
            cfg.corpus_path = base_corpus;
            if (base_samples > 0) cfg.boolean_qa.samples = base_samples;
            auto variant = evex::naive_variant_from_string(base_variant);
            if (!variant) throw evex::ConfigError("unknown variant '" + base_variant + "'");
            evex::Session session(cfg);
            auto specs = spec_map(base_classes);
            auto corpus = evex::io::load_corpus(base_corpus);
            auto run = evex::exhaustive_detect(session.gw(), corpus, specs, *variant,
                                               cfg.boolean_qa);
            print_warnings(run.warnings);
            evex::io::save_detections(run.detections, base_out);
            session.ledger->write_jsonl(default_ledger_path(base_out));
            write_stage_manifest("baseline", cfg, {base_classes, base_corpus},
                                 session.ledger.get(), default_manifest_path(base_out));
            std::cout << run.detections.size() << " detections (" << session.ledger->size()
                      << " draws) -> " << base_out << "\n";
            return 0;
        }

        if (cmd_extract->parsed()) {
            auto cfg = state.config;
            cfg.classes_path = ext_classes;
            cfg.corpus_path = ext_corpus;
            if (!ext_policy.empty()) cfg.modality_policy = ext_policy;
            auto policy = evex::modality_policy_from_string(cfg.modality_policy);
            if (!policy)
                throw evex::ConfigError("unknown modality policy '" + cfg.modality_policy + "'");
            evex::Session session(cfg);
            auto specs = spec_map(ext_classes);
            auto corpus = evex::io::load_corpus(ext_corpus);
            auto detections = evex::io::load_detections(ext_detections);
            auto run = evex::extract(session.gw(), detections, corpus, specs, cfg.extraction,
                                     *policy, cfg.workers);
            print_warnings(run.warnings);
            evex::io::save_pairs(run.pairs, ext_out);
            session.ledger->write_jsonl(default_ledger_path(ext_out));
            write_stage_manifest("extract", cfg, {ext_classes, ext_corpus, ext_detections},
                                 session.ledger.get(), default_manifest_path(ext_out));
            std::cout << run.pairs.size() << " pairs -> " << ext_out << "\n";
            return 0;
        }

        if (cmd_affiliate->parsed()) {
            auto cfg = state.config;
            if (cfg.gazetteer_countries.empty()) {
                cfg.gazetteer_countries = aff_gazetteer + "/countries.tsv";
                cfg.gazetteer_code_names = aff_gazetteer + "/code_names.tsv";
                cfg.gazetteer_us_extensions = aff_gazetteer + "/us_extensions.tsv";
            }
            if (cmd_affiliate->count("--geocoder")) cfg.geocoder.mode = aff_geocoder;
            if (!aff_geocoder_cache.empty()) cfg.geocoder.cache_path = aff_geocoder_cache;
            evex::Session session(cfg);
            auto corpus = evex::io::load_corpus(aff_corpus);
            auto pairs = evex::io::load_pairs(aff_pairs);
            auto gazetteer = evex::load_configured_gazetteer(cfg);
            auto geocoder = evex::make_geocoder(cfg.geocoder);
            auto run = evex::affiliate(session.gw(), pairs, corpus, gazetteer, cfg.boolean_qa,
                                       geocoder.get());
            print_warnings(run.warnings);
            evex::io::save_affiliations(run.instances, aff_out);
            session.ledger->write_jsonl(default_ledger_path(aff_out));
            write_stage_manifest("affiliate", cfg, {aff_pairs, aff_corpus},
                                 session.ledger.get(), default_manifest_path(aff_out));
            std::cout << run.instances.size() << " affiliated instances -> " << aff_out << "\n";
            return 0;
        }

        if (cmd_graph->parsed()) {
            auto bucketing = evex::bucketing_from_string(graph_bucket);
            if (!bucketing) throw evex::ConfigError("unknown bucket '" + graph_bucket + "'");
            auto instances = evex::io::load_affiliations(graph_affiliations);
            auto graph = evex::aggregate_graph(instances, *bucketing);
            evex::export_edges(graph, graph_out);
            write_stage_manifest("graph", state.config, {graph_affiliations}, nullptr,
                                 default_manifest_path(graph_out));
            std::cout << graph.edges.size() << " edges (" << graph.excluded
                      << " instances excluded) -> " << graph_out << "\n";
            return 0;
        }

        if (cmd_eval->parsed()) {
            auto gold = evex::io::load_gold(eval_gold);
            evex::ScoreReport report;
            if (eval_dyadic) {
                auto role_map = evex::io::load_role_map(eval_role_map);
                auto pred = evex::io::load_pairs(eval_pred);
                const auto policy = eval_match == "head" ? evex::ActorMatchPolicy::HeadOverlap
                                                         : evex::ActorMatchPolicy::Exact;
                report = evex::score_dyadic(pred, gold, role_map, policy);
                print_score_table(report, "dyadic argument extraction");
            } else {
                auto pred = evex::io::load_detections(eval_pred);
                report = evex::score_detection(pred, gold);
                print_score_table(report, "event detection");
            }
            print_warnings(report.warnings);
            const json out = score_to_json(report);
            std::cout << out.dump(2) << "\n";
            {
                std::ofstream f(eval_out, std::ios::trunc);
                f << out.dump(2) << "\n";
            }
            write_stage_manifest("evaluate", state.config, {eval_gold, eval_pred}, nullptr,
                                 default_manifest_path(eval_out));
            return 0;
        }

        if (cmd_eff->parsed()) {
            auto entries = evex::QueryLedger::read_jsonl(eff_ledger);
            if (eff_samples <= 0) {
                // largest disambiguation sample index in the ledger fixes the batch size
                long inferred = 0;
                for (const auto& e : entries) {
                    if (e.purpose == "disambiguation")
                        inferred = std::max(inferred, long(e.sample_index) + 1);
                }
                eff_samples = inferred > 0 ? inferred : 1;
            }
            auto rep = evex::efficiency_report(entries, eff_sentences, eff_classes, eff_samples);
            json out = {{"pipeline_draws", rep.pipeline_draws},
                        {"exhaustive_draws", rep.exhaustive_draws},
                        {"ratio_percent", rep.ratio_percent},
                        {"by_purpose", rep.by_purpose}};
            std::printf("pipeline boolean draws: %ld\n", rep.pipeline_draws);
            std::printf("exhaustive draws (S x T x samples): %ld\n", rep.exhaustive_draws);
            std::printf("ratio: %.1f%%\n", rep.ratio_percent);
            if (!eff_dump.empty()) {
                auto rows = evex::io::load_response_dump(eff_dump);
                auto unanimity = evex::unanimity_report(rows);
                out["unanimity"] = {{"groups", unanimity.groups},
                                    {"proportion_unanimous", unanimity.proportion_unanimous}};
                json hist = json::object();
                for (const auto& [minority, count] : unanimity.minority_histogram)
                    hist[std::to_string(minority)] = count;
                out["unanimity"]["minority_histogram"] = hist;
                std::printf("boolean unanimity: %.4f over %ld prompts\n",
                            unanimity.proportion_unanimous, unanimity.groups);
            }
            std::cout << out.dump(2) << "\n";
            {
                std::ofstream f(eff_out, std::ios::trunc);
                f << out.dump(2) << "\n";
            }
            write_stage_manifest("efficiency", state.config, {eff_ledger}, nullptr,
                                 default_manifest_path(eff_out));
            return 0;
        }

        if (cmd_curve->parsed()) {
            evex::Session session(state.config);
            std::vector<evex::Sentence> corpus;
            std::vector<evex::GoldAnnotation> gold;
            if (!curve_corpus.empty()) corpus = evex::io::load_corpus(curve_corpus);
            if (!curve_gold.empty()) {
                if (curve_corpus.empty())
                    throw evex::ConfigError("curve --gold needs --corpus");
                const std::string cls = curve_class.empty() ? curve_term : curve_class;
                for (auto& g : evex::io::load_gold(curve_gold)) {
                    if (g.class_id == cls) gold.push_back(std::move(g));
                }
            }

            std::ofstream out(curve_out, std::ios::trunc);
            if (!out) throw evex::ConfigError("cannot write " + curve_out);
            out << "temperature,draw,cumulative_size";
            if (!corpus.empty()) out << ",matches,cost_percent";
            if (!gold.empty()) out << ",recall_percent";
            out << "\n";

            for (const auto& temp_str : evex::str::split(curve_temps, ',')) {
                const double temp = std::stod(temp_str);
                evex::McConfig cfg;
                cfg.temperature = temp;
                cfg.samples = curve_samples;
                auto batch = session.gw().complete(
                    {evex::prompts::synonyms(curve_term, curve_definition),
                     evex::Purpose::Synonym},
                    cfg);

                // prefix unions over the draw sequence
                std::set<std::string> surface{evex::str::to_lower(curve_term)};
                for (int y = 0; y < curve_samples; ++y) {
                    auto items = evex::parse::bullet_list(batch.raw_texts[size_t(y)]);
                    if (items) surface.insert(items->begin(), items->end());

                    out << temp_str << "," << y + 1 << "," << surface.size();
                    if (!corpus.empty()) {
                        evex::TriggerStemSet stems;
                        stems.class_id = curve_term;
                        for (const auto& form : surface)
                            stems.add(form, curve_term, evex::ExpansionKind::Synonym);
                        std::map<std::string, evex::TriggerStemSet> lexicons{
                            {curve_term, stems}};
                        long matches = 0;
                        for (const auto& sentence : corpus)
                            matches += long(evex::match_candidates(sentence, lexicons).size());
                        out << "," << matches << ","
                            << 100.0 * double(matches) / double(corpus.size());
                        if (!gold.empty()) {
                            // an instance is covered when its trigger carries one of
                            // the candidate stems (its sentence, when no trigger given)
                            long covered = 0;
                            for (const auto& g : gold) {
                                bool hit = false;
                                if (!g.trigger.empty()) {
                                    auto sentence = evex::make_sentence("g", 0, g.trigger);
                                    hit = !evex::match_candidates(sentence, lexicons).empty();
                                } else {
                                    for (const auto& sentence : corpus) {
                                        if (sentence.id == g.sentence_id &&
                                            !evex::match_candidates(sentence, lexicons).empty())
                                            hit = true;
                                    }
                                }
                                if (hit) ++covered;
                            }
                            out << "," << 100.0 * double(covered) / double(gold.size());
                        }
                    }
                    out << "\n";
                }
            }
            write_stage_manifest("curve", state.config, {curve_corpus, curve_gold},
                                 session.ledger.get(), default_manifest_path(curve_out));
            std::cout << "curves -> " << curve_out << "\n";
            return 0;
        }

        throw evex::ConfigError("no subcommand executed");
    } catch (const evex::BackendError& e) {
        std::cerr << "backend failure: " << e.what() << "\n";
        return 3;
    } catch (const evex::MockScriptError& e) {
        std::cerr << "backend failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
