#include "recourse/session/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "recourse/error.hpp"

namespace recourse::session {
namespace {

bool safe_id(const std::string& id) {
  return !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
  });
}

void append_line(const std::filesystem::path& file, const std::string& line) {
  std::ofstream out(file, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to '" + file.string() + "'");
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + file.string() + "' failed");
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir_ / "sessions", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + data_dir_.string() + "': " + ec.message());
}

std::filesystem::path SessionStore::path_for(const std::string& session_id) const {
  if (!safe_id(session_id)) throw Error(ErrorCode::NotFound, "invalid session id '" + session_id + "'");
  return data_dir_ / "sessions" / (session_id + ".jsonl");
}

void SessionStore::begin(const SessionRecord& header_only) {
  std::lock_guard lock(mu_);
  const auto file = path_for(header_only.session_id);
  if (std::filesystem::exists(file)) {
    throw Error(ErrorCode::IoError, "session file '" + file.string() + "' already exists");
  }
  append_line(file, serialize_event(header_only.header()));
  for (const auto& e : header_only.events) append_line(file, serialize_event(e));
  nlohmann::json idx = {{"session_id", header_only.session_id},
                        {"path", std::filesystem::relative(file, data_dir_).generic_string()}};
  append_line(data_dir_ / "index.jsonl", idx.dump());
}

void SessionStore::append(const std::string& session_id, const Event& e) {
  std::lock_guard lock(mu_);
  append_line(path_for(session_id), serialize_event(e));
}

bool SessionStore::contains(const std::string& session_id) const {
  if (!safe_id(session_id)) return false;
  std::lock_guard lock(mu_);
  return std::filesystem::exists(path_for(session_id));
}

SessionRecord SessionStore::load(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  const auto file = path_for(session_id);
  if (!std::filesystem::exists(file)) throw Error(ErrorCode::NotFound, "no session '" + session_id + "'");
  return parse_record(slurp(file));
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  std::ifstream in(data_dir_ / "index.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("session_id")) out.push_back(j["session_id"].get<std::string>());
  }
  return out;
}

std::filesystem::path write_record(const SessionRecord& record, const std::filesystem::path& dest_dir) {
  std::error_code ec;
  std::filesystem::create_directories(dest_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dest_dir.string() + "': " + ec.message());
  if (!safe_id(record.session_id)) throw Error(ErrorCode::IoError, "unsafe session id for a file name");
  const auto file = dest_dir / (record.session_id + ".jsonl");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << serialize_record(record);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + file.string() + "' failed");
  return file;
}

SessionRecord read_record(const std::filesystem::path& file) { return parse_record(slurp(file)); }

}  // namespace recourse::session
