#include "oip/record_log.hpp"

#include <fstream>

#include "oip/errors.hpp"

namespace oip {

std::filesystem::path records_path(const std::filesystem::path& dir) {
  return dir / "records.jsonl";
}
std::filesystem::path manifest_path(const std::filesystem::path& dir) {
  return dir / "manifest.json";
}

nlohmann::json record_to_json(const AdministrationRecord& rec) {
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : rec.attempts) {
    nlohmann::json attempt{{"raw_text", a.raw_text}};
    if (a.parsed)
      attempt["parsed"] = *a.parsed;
    else
      attempt["parsed"] = nullptr;
    attempts.push_back(std::move(attempt));
  }
  nlohmann::json j{
      {"format_version", kFormatVersion},
      {"model_id", rec.key.model_id},
      {"version_tag", rec.key.version_tag},
      {"language", std::string(language_code(rec.key.language))},
      {"mode", std::string(mode_name(rec.key.mode))},
      {"item_id", rec.key.item_id},
      {"replication", rec.key.replication},
      {"attempts", std::move(attempts)},
      {"timestamp_ms", rec.timestamp_ms},
  };
  if (rec.final_value)
    j["final_value"] = *rec.final_value;
  else
    j["final_value"] = nullptr;
  return j;
}

AdministrationRecord record_from_json(const nlohmann::json& j) {
  AdministrationRecord rec;
  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw SchemaViolation("unsupported record format_version");
    rec.key.model_id = j.at("model_id").get<std::string>();
    rec.key.version_tag = j.at("version_tag").get<std::string>();
    const auto lang = language_from_code(j.at("language").get<std::string>());
    const auto mode = mode_from_name(j.at("mode").get<std::string>());
    if (!lang || !mode) throw SchemaViolation("bad language/mode in record");
    rec.key.language = *lang;
    rec.key.mode = *mode;
    rec.key.item_id = j.at("item_id").get<int>();
    rec.key.replication = j.at("replication").get<int>();
    rec.timestamp_ms = j.at("timestamp_ms").get<int64_t>();
    for (const auto& a : j.at("attempts")) {
      Attempt attempt;
      attempt.raw_text = a.at("raw_text").get<std::string>();
      if (!a.at("parsed").is_null()) attempt.parsed = a.at("parsed").get<int>();
      rec.attempts.push_back(std::move(attempt));
    }
    if (!j.at("final_value").is_null()) rec.final_value = j.at("final_value").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation(std::string("bad record: ") + e.what());
  }
  return rec;
}

std::set<std::string> RunArtifact::cell_keys() const {
  std::set<std::string> keys;
  for (const auto& r : records) keys.insert(r.key.cell_string());
  return keys;
}

RunArtifact load_artifact(const std::filesystem::path& dir) {
  RunArtifact art;
  art.dir = dir;
  {
    std::ifstream in(manifest_path(dir));
    if (!in) throw MissingFile("no manifest.json in " + dir.string());
    try {
      in >> art.manifest;
    } catch (const nlohmann::json::exception& e) {
      throw SchemaViolation(std::string("bad manifest.json: ") + e.what());
    }
  }
  std::ifstream in(records_path(dir));
  if (!in) return art;  // manifest written, nothing administered yet

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  std::set<std::string> seen;
  for (size_t i = 0; i < lines.size(); ++i) {
    nlohmann::json j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size()) break;  // torn tail from an interrupted run
      throw SchemaViolation("malformed record at line " + std::to_string(i + 1) + " of " +
                            records_path(dir).string());
    }
    AdministrationRecord rec = record_from_json(j);
    const std::string key = rec.key.cell_string();
    if (!seen.insert(key).second)
      throw SchemaViolation("duplicate record for cell " + key + " in " +
                            records_path(dir).string());
    art.records.push_back(std::move(rec));
  }
  return art;
}

bool trim_torn_tail(const std::filesystem::path& dir) {
  const auto path = records_path(dir);
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (content.empty()) return false;

  const bool ends_clean = content.back() == '\n';
  size_t last_start = content.find_last_of('\n', content.size() - (ends_clean ? 2 : 1));
  last_start = last_start == std::string::npos ? 0 : last_start + 1;
  const size_t last_len = content.size() - last_start - (ends_clean ? 1 : 0);
  const std::string last_line = content.substr(last_start, last_len);
  if (last_line.empty()) return false;
  const bool parses = !nlohmann::json::parse(last_line, nullptr, false).is_discarded();
  if (parses && ends_clean) return false;

  const auto tmp = path.string() + ".repair";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (parses)
      out << content << "\n";  // intact record, only the newline was lost
    else
      out << content.substr(0, last_start);
  }
  std::filesystem::rename(tmp, path);
  return true;
}

RecordLogWriter::RecordLogWriter(const std::filesystem::path& dir)
    : out_(records_path(dir), std::ios::app | std::ios::binary) {
  if (!out_) throw MissingFile("cannot open " + records_path(dir).string() + " for append");
}

void RecordLogWriter::append(const AdministrationRecord& rec) {
  out_ << record_to_json(rec).dump() << "\n";
  out_.flush();
}

}  // namespace oip
