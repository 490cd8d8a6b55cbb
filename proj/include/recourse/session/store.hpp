#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "recourse/session/record.hpp"

namespace recourse::session {

// Destination for a session's event stream.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void begin(const SessionRecord& header_only) = 0;
  virtual void append(const std::string& session_id, const Event& e) = 0;
};

// Append-only JSONL store:
//   <data_dir>/sessions/<id>.jsonl   canonical record, one line per event
//   <data_dir>/index.jsonl           {"session_id", "path"} per created session
// Every append is flushed before returning.
class SessionStore final : public EventSink {
 public:
  explicit SessionStore(std::filesystem::path data_dir);

  void begin(const SessionRecord& header_only) override;
  void append(const std::string& session_id, const Event& e) override;

  bool contains(const std::string& session_id) const;
  // Throws Error(NotFound).
  SessionRecord load(const std::string& session_id) const;
  std::vector<std::string> ids() const;
  std::filesystem::path path_for(const std::string& session_id) const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  std::filesystem::path data_dir_;
  mutable std::mutex mu_;
};

// Writes one canonical record file per id as <dest>/<id>.jsonl.
// Throws Error(IoError) if the destination cannot be written.
std::filesystem::path write_record(const SessionRecord& record, const std::filesystem::path& dest_dir);
SessionRecord read_record(const std::filesystem::path& file);

}  // namespace recourse::session
