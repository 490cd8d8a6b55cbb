// recourse: serve the chat API, run terminal sessions, replay scripts and
// summarize study data.

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>

#include "CLI11.hpp"
#include "recourse/data/bundled.hpp"
#include "recourse/error.hpp"
#include "recourse/server/http_server.hpp"
#include "recourse/session/factory.hpp"
#include "recourse/session/replay.hpp"
#include "recourse/session/service.hpp"
#include "recourse/study/bootstrap.hpp"
#include "recourse/study/metrics.hpp"
#include "recourse/study/survey.hpp"
#include "recourse/text/pipeline.hpp"

namespace fs = std::filesystem;
using namespace recourse;
using nlohmann::json;

namespace {

session::ServiceConfig service_config(const std::string& path) {
  if (path.empty()) {
    session::ServiceConfig cfg;
    cfg.data_dir = fs::current_path() / "var" / "sessions";
    return cfg;
  }
  return session::load_service_config(path);
}

std::shared_ptr<const text::StopList> stoplist_for(const session::ServiceConfig& cfg) {
  if (cfg.stopwords_path.empty()) {
    return std::make_shared<text::StopList>(text::parse_stoplist(data::bundled_stopwords()));
  }
  return std::make_shared<text::StopList>(text::load_stoplist(cfg.stopwords_path));
}

session::Condition parse_condition(const std::string& s) {
  auto c = session::condition_from_string(s);
  if (!c) throw Error(ErrorCode::InvalidInput, "condition must be 'fixed' or 'dynamic'");
  return *c;
}

void emit_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + out_path + "'");
  out << content;
}

session::SessionService make_service(const session::ServiceConfig& cfg) {
  session::ServiceDeps deps;
  deps.stoplist = stoplist_for(cfg);
  deps.store = std::make_shared<session::SessionStore>(cfg.data_dir);
  return session::SessionService(cfg, std::move(deps));
}

int run_serve(const std::string& config_path, const std::string& address, std::uint16_t port, int threads) {
  const auto cfg = service_config(config_path);
  auto service = make_service(cfg);

  // Block termination signals in every thread; the main thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  server::HttpServer http(service, {.address = address, .port = port, .threads = threads});
  http.start();
  std::cerr << "listening on " << address << ":" << http.port() << ", sessions in " << cfg.data_dir.string() << "\n";
  int sig = 0;
  sigwait(&signals, &sig);
  std::cerr << "shutting down\n";
  http.stop();
  service.close_all();
  return 0;
}

bool ask_yes_no(const std::string& question) {
  for (std::string line;;) {
    std::cout << question << " [y/n] " << std::flush;
    if (!std::getline(std::cin, line)) return false;
    auto t = text::trim(line);
    if (t == "y" || t == "yes") return true;
    if (t == "n" || t == "no") return false;
  }
}

filter::FutureChoice ask_future(const std::string& question) {
  for (std::string line;;) {
    std::cout << question << " [a]pprove / [d]efer / [b]lock " << std::flush;
    if (!std::getline(std::cin, line)) return filter::FutureChoice::Defer;
    auto t = text::trim(line);
    if (t == "a" || t == "approve") return filter::FutureChoice::Approve;
    if (t == "d" || t == "defer") return filter::FutureChoice::Defer;
    if (t == "b" || t == "block") return filter::FutureChoice::Block;
  }
}

void print_outcome(const session::TurnOutcome& o) {
  std::cout << "bot> " << o.text << "\n";
}

int run_chat(const std::string& config_path, const std::string& condition) {
  const auto cfg = service_config(config_path);
  auto service = make_service(cfg);
  const auto id = service.create_session(cfg.session_defaults(parse_condition(condition)));
  std::cout << "session " << id << " (empty line or EOF ends it)\n";

  for (std::string line;;) {
    std::cout << "you> " << std::flush;
    if (!std::getline(std::cin, line) || text::trim(line).empty()) break;
    session::TurnOutcome o;
    try {
      o = service.post_user_message(id, line);
    } catch (const Error& e) {
      std::cout << "[" << to_string(e.code()) << "] " << e.what() << "\n";
      if (e.code() == ErrorCode::SessionClosed) break;
      continue;
    }
    if (o.kind != session::OutcomeKind::RecoursePrompt) {
      print_outcome(o);
      continue;
    }
    filter::UserDecision d;
    d.prompt_id = o.prompt->prompt_id;
    if (ask_yes_no(o.prompt->question)) {
      d.a1 = filter::ViewChoice::View;
      d.a2 = ask_future(o.prompt->followup);
    } else {
      d.a1 = filter::ViewChoice::Decline;
    }
    try {
      print_outcome(service.post_decision(id, d));
    } catch (const Error& e) {
      std::cout << "[" << to_string(e.code()) << "] " << e.what() << "\n";
      if (e.code() == ErrorCode::SessionClosed) break;
    }
  }
  service.close_all();
  std::cout << "saved " << (cfg.data_dir / "sessions" / (id + ".jsonl")).string() << "\n";
  return 0;
}

struct ReplayArgs {
  std::string record, script, transcript, condition = "dynamic", config, out, session_id = "replay";
};

int run_replay(const ReplayArgs& a) {
  const auto cfg = service_config(a.config);
  const auto stoplist = stoplist_for(cfg);
  session::SessionRecord result;
  if (!a.record.empty()) {
    result = session::replay(session::read_record(a.record), *stoplist);
  } else {
    if (a.script.empty() || a.transcript.empty()) {
      throw Error(ErrorCode::InvalidInput, "replay needs --record, or both --script and --transcript");
    }
    auto session_cfg = cfg.session_defaults(parse_condition(a.condition));
    result = session::replay_script(session_cfg, session::load_decision_script(a.script),
                                    model::load_script(a.transcript), session::make_scorer(session_cfg.scorer),
                                    stoplist, {.session_id = a.session_id});
  }
  emit_output(a.out, session::serialize_record(result));
  return 0;
}

int run_export(const std::string& config_path, const std::vector<std::string>& ids, const std::string& out) {
  const auto cfg = service_config(config_path);
  session::SessionStore store(cfg.data_dir);
  std::vector<session::SessionRecord> records;
  for (const auto& id : ids) records.push_back(store.load(id));  // all or nothing
  for (const auto& r : records) std::cout << session::write_record(r, out).string() << "\n";
  return 0;
}

std::vector<session::SessionRecord> read_session_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "no directory '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const auto& p = entry.path();
    if (entry.is_regular_file() && p.extension() == ".jsonl" && p.filename() != "index.jsonl") files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  std::vector<session::SessionRecord> records;
  for (const auto& f : files) records.push_back(session::read_record(f));
  return records;
}

int run_metrics(const std::string& dir, const std::string& out) {
  const auto records = read_session_dir(dir);
  json report = study::to_json(study::summarize(records));
  auto sessions = json::array();
  for (const auto& r : records) {
    const auto im = study::interaction_metrics(r);
    const auto tm = study::toxicity_metrics(r);
    json cats = json::object();
    for (std::size_t i = 0; i < scoring::kCategoryCount; ++i) {
      cats[std::string(scoring::name(scoring::kAllCategories[i]))] = tm.category_means[i];
    }
    sessions.push_back({{"session_id", r.session_id},
                        {"condition", std::string(session::to_string(r.config.condition))},
                        {"interaction_count", im.interaction_count},
                        {"avg_word_count", im.avg_word_count},
                        {"avg_char_count", im.avg_char_count},
                        {"empty", im.empty},
                        {"response_count", tm.response_count},
                        {"scored_responses", tm.scored_responses},
                        {"safety_response_count", tm.safety_response_count},
                        {"category_means", cats}});
  }
  emit_output(out, json{{"by_condition", report}, {"sessions", sessions}}.dump(2) + "\n");
  return 0;
}

study::SusBands bands_for(const std::string& path) {
  return path.empty() ? study::SusBands::parse(data::bundled_sus_grades()) : study::SusBands::load(path);
}

int run_survey_score(const std::string& in, const std::string& bands, const std::string& out) {
  emit_output(out, study::survey_report(study::load_survey_csv(in), bands_for(bands)).dump(2) + "\n");
  return 0;
}

// CSV: participant_id,fixed,dynamic
int run_survey_paired(const std::string& in, std::size_t resamples, std::uint64_t seed, const std::string& out) {
  std::ifstream f(in, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + in + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  auto rows = study::parse_csv(buf.str());
  if (rows.empty()) throw Error(ErrorCode::ParseError, "empty pairs file");
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 3) throw Error(ErrorCode::ParseError, "pairs line " + std::to_string(i + 1) + ": need 3 fields");
    try {
      pairs.emplace_back(std::stod(rows[i][1]), std::stod(rows[i][2]));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "pairs line " + std::to_string(i + 1) + ": bad number");
    }
  }
  const auto s = study::paired_condition_summary(pairs, resamples, seed);
  emit_output(out, json{{"mean_difference", s.mean_difference},
                        {"ci_low", s.ci_low},
                        {"ci_high", s.ci_high},
                        {"n", s.n},
                        {"resamples", s.resamples},
                        {"seed", seed}}
                       .dump(2) +
                       "\n");
  return 0;
}

int run_survey_order(const std::vector<std::string>& ids, std::uint64_t seed) {
  for (const auto& id : ids) {
    const auto o = study::assign_condition_order(id, seed);
    std::cout << id << "\t" << session::to_string(o.first) << "\t" << session::to_string(o.second) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chat filtering with user recourse"};
  app.require_subcommand(1);

  std::string config;
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;
  int threads = 4;
  auto* serve = app.add_subcommand("serve", "Run the HTTP/WebSocket API");
  serve->add_option("--config", config, "Service configuration JSON")->check(CLI::ExistingFile);
  serve->add_option("--address", address, "Listen address");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string condition = "dynamic";
  auto* chat = app.add_subcommand("chat", "Interactive session in the terminal");
  chat->add_option("--config", config, "Service configuration JSON")->check(CLI::ExistingFile);
  chat->add_option("--condition", condition, "fixed or dynamic");

  ReplayArgs replay;
  auto* rep = app.add_subcommand("replay", "Replay a recorded session or a scripted conversation");
  rep->add_option("--record", replay.record, "Recorded session JSONL to re-run")->check(CLI::ExistingFile);
  rep->add_option("--script", replay.script, "User script JSONL")->check(CLI::ExistingFile);
  rep->add_option("--transcript", replay.transcript, "Model script JSONL")->check(CLI::ExistingFile);
  rep->add_option("--condition", replay.condition, "fixed or dynamic");
  rep->add_option("--config", replay.config, "Service configuration JSON")->check(CLI::ExistingFile);
  rep->add_option("--session-id", replay.session_id, "Id given to a scripted session");
  rep->add_option("--out", replay.out, "Output file (default stdout)");

  std::vector<std::string> ids;
  std::string out;
  auto* exp = app.add_subcommand("export", "Copy stored sessions for coding");
  exp->add_option("--session", ids, "Session id (repeatable)")->required();
  exp->add_option("--out", out, "Destination directory")->required();
  exp->add_option("--config", config, "Service configuration JSON")->check(CLI::ExistingFile);

  std::string sessions_dir;
  auto* met = app.add_subcommand("metrics", "Summarize interaction and toxicity metrics");
  met->add_option("--sessions", sessions_dir, "Directory of session JSONL files")->required();
  met->add_option("--out", out, "Report path (default stdout)");

  auto* survey = app.add_subcommand("survey", "Questionnaire tools");
  survey->require_subcommand(1);
  std::string in, bands;
  auto* score = survey->add_subcommand("score", "Score a questionnaire CSV");
  score->add_option("--in", in, "CSV: participant_id,condition,item_1..item_18,free_text")
      ->required()
      ->check(CLI::ExistingFile);
  score->add_option("--bands", bands, "Grade table TSV (default: bundled)")->check(CLI::ExistingFile);
  score->add_option("--out", out, "Report path (default stdout)");

  std::size_t resamples = study::kDefaultResamples;
  std::uint64_t seed = 0;
  auto* paired = survey->add_subcommand("paired", "Paired bootstrap of dynamic minus fixed");
  paired->add_option("--in", in, "CSV: participant_id,fixed,dynamic")->required()->check(CLI::ExistingFile);
  paired->add_option("--resamples", resamples, "Bootstrap resamples")->check(CLI::PositiveNumber);
  paired->add_option("--seed", seed, "RNG seed");
  paired->add_option("--out", out, "Report path (default stdout)");

  auto* order = survey->add_subcommand("order", "Condition order per participant");
  order->add_option("ids", ids, "Participant ids")->required();
  order->add_option("--seed", seed, "Assignment seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(config, address, port, threads);
    if (*chat) return run_chat(config, condition);
    if (*rep) return run_replay(replay);
    if (*exp) return run_export(config, ids, out);
    if (*met) return run_metrics(sessions_dir, out);
    if (*score) return run_survey_score(in, bands, out);
    if (*paired) return run_survey_paired(in, resamples, seed, out);
    if (*order) return run_survey_order(ids, seed);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
