#include "intentscape/artifacts.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "intentscape/error.hpp"

namespace intentscape::artifacts {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

json hashes_to_json(const std::vector<FileHash>& hs) {
  json a = json::array();
  for (const auto& h : hs) {
    json e{{"path", h.name}, {"sha256", h.sha256}};
    if (h.external) e["external"] = true;
    a.push_back(std::move(e));
  }
  return a;
}

std::vector<FileHash> hashes_from_json(const json& a) {
  std::vector<FileHash> out;
  for (const auto& e : a)
    out.push_back(FileHash{e.at("path").get<std::string>(), e.at("sha256").get<std::string>(),
                           e.value("external", false)});
  return out;
}

}  // namespace

json meta_to_json(const StageMeta& m) {
  return json{{"stage", m.stage},
              {"config", m.config},
              {"inputs", hashes_to_json(m.inputs)},
              {"outputs", hashes_to_json(m.outputs)}};
}

StageMeta meta_from_json(const json& j) {
  return StageMeta{j.at("stage").get<std::string>(), j.at("config"), hashes_from_json(j.at("inputs")),
                   hashes_from_json(j.at("outputs"))};
}

Workspace::Workspace(fs::path dir, bool force) : dir_(std::move(dir)), force_(force) {}

bool Workspace::exists(std::string_view name) const { return fs::exists(path(name)); }

std::optional<StageMeta> Workspace::producer(std::string_view name) const {
  if (!fs::is_directory(dir_)) return std::nullopt;
  std::vector<fs::path> metas;
  for (const auto& e : fs::directory_iterator(dir_)) {
    const auto fname = e.path().filename().string();
    if (fname.size() > 10 && fname.ends_with(".meta.json")) metas.push_back(e.path());
  }
  std::sort(metas.begin(), metas.end());
  // Several stages may write the same file; the one whose recorded hash
  // matches the current bytes is the producer.
  const auto current = exists(name) ? std::optional(sha256_hex(read_file(path(name)))) : std::nullopt;
  std::optional<StageMeta> fallback;
  for (const auto& p : metas) {
    StageMeta m;
    try {
      m = meta_from_json(json::parse(read_file(p)));
    } catch (const json::exception& e) {
      throw StaleArtifactError("corrupt stage metadata " + p.filename().string() + ": " + e.what());
    }
    for (const auto& o : m.outputs) {
      if (o.name != name) continue;
      if (current && o.sha256 == *current) return m;
      if (!fallback) fallback = m;
    }
  }
  return fallback;
}

void Workspace::stale(const std::string& what) const {
  if (force_) {
    spdlog::warn("{} (continuing because of --force)", what);
    return;
  }
  throw StaleArtifactError(what + "; re-run the producing stage or pass --force");
}

void Workspace::verify_impl(std::string_view name, std::vector<std::string>& seen) const {
  if (std::find(seen.begin(), seen.end(), name) != seen.end()) return;
  seen.emplace_back(name);
  const auto bytes = read_file(path(name));
  auto meta = producer(name);
  if (!meta) {
    stale(std::string(name) + " has no producing stage metadata");
    return;
  }
  const auto recorded = std::find_if(meta->outputs.begin(), meta->outputs.end(),
                                     [&](const FileHash& h) { return h.name == name; });
  if (recorded->sha256 != sha256_hex(bytes))
    stale(std::string(name) + " was modified after stage '" + meta->stage + "' wrote it");
  for (const auto& in : meta->inputs) {
    if (in.external) continue;
    if (!exists(in.name)) throw MissingArtifactError(path(in.name).string());
    if (sha256_hex(read_file(path(in.name))) != in.sha256)
      stale("stage '" + meta->stage + "' is stale: its input " + in.name + " changed");
    verify_impl(in.name, seen);
  }
}

void Workspace::verify(std::string_view name) const {
  std::vector<std::string> seen;
  verify_impl(name, seen);
}

std::string Workspace::read_verified(std::string_view name) const {
  if (!exists(name)) throw MissingArtifactError(path(name).string());
  verify(name);
  return read_file(path(name));
}

FileHash Workspace::external_input(const fs::path& p) {
  return FileHash{p.filename().string(), sha256_hex(read_file(p)), true};
}

void Workspace::write_stage(const std::string& stage, const json& config, const std::vector<std::string>& inputs,
                            const std::vector<FileHash>& external_inputs,
                            const std::vector<std::pair<std::string, std::string>>& outputs) const {
  StageMeta m;
  m.stage = stage;
  m.config = config;
  m.inputs = external_inputs;
  for (const auto& name : inputs) m.inputs.push_back(FileHash{name, sha256_hex(read_file(path(name))), false});
  for (const auto& [name, content] : outputs) {
    write_atomic(path(name), content);
    m.outputs.push_back(FileHash{name, sha256_hex(content), false});
  }
  write_atomic(path(stage + ".meta.json"), meta_to_json(m).dump(2) + "\n");
}

}  // namespace intentscape::artifacts
