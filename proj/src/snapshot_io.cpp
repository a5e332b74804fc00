#include "obstacle_mcf/snapshot_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "obstacle_mcf/errors.hpp"

namespace obstacle_mcf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormatVersion = "1";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string snapshot_name(std::int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06lld", static_cast<long long>(step));
  return buf;
}

std::vector<fs::path> write_snapshot(const fs::path& dir, const Snapshot& snap) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const PhaseState& s = snap.state;
  const Grid& g = s.grid();

  json meta;
  meta["format_version"] = kFormatVersion;
  meta["dim"] = g.dim();
  json nodes = json::array();
  json extent = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    nodes.push_back(g.nodes(a));
    extent.push_back(g.extent(a));
  }
  meta["nodes"] = nodes;
  meta["extent"] = extent;
  meta["h"] = g.h();
  meta["epsilon"] = s.epsilon;
  meta["delta"] = s.delta ? json(*s.delta) : json(nullptr);
  meta["t"] = s.t;
  meta["scheme"] = to_string(s.scheme);
  meta["step"] = snap.step;
  meta["dissipation_accum"] = snap.dissipation_accum;
  meta["lambda_mass"] = snap.lambda_mass;

  const fs::path meta_path = dir / "meta.json";
  const fs::path field_path = dir / "field.f64";
  {
    std::ofstream os(meta_path);
    os << meta.dump(2) << '\n';
    if (!os) throw IoError("failed writing " + meta_path.string());
  }
  {
    std::vector<std::uint64_t> raw(s.field.values.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      raw[i] = to_little(std::bit_cast<std::uint64_t>(s.field.values[i]));
    }
    std::ofstream os(field_path, std::ios::binary);
    os.write(reinterpret_cast<const char*>(raw.data()),
             static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
    if (!os) throw IoError("failed writing " + field_path.string());
  }
  return {meta_path, field_path};
}

Snapshot read_snapshot(const fs::path& dir) {
  const json meta = read_json(dir / "meta.json");
  Snapshot snap;
  try {
    if (meta.at("format_version").get<std::string>() != kFormatVersion) {
      throw IoError(dir.string() + ": unsupported snapshot format");
    }
    const int dim = meta.at("dim").get<int>();
    std::vector<std::size_t> nodes = meta.at("nodes").get<std::vector<std::size_t>>();
    std::vector<double> extent = meta.at("extent").get<std::vector<double>>();
    if (static_cast<int>(nodes.size()) != dim || static_cast<int>(extent.size()) != dim) {
      throw IoError(dir.string() + ": nodes/extent do not match dim");
    }
    const Grid grid(dim, nodes, extent);
    snap.state.field = ScalarField(grid);
    snap.state.epsilon = meta.at("epsilon").get<double>();
    if (!meta.at("delta").is_null()) snap.state.delta = meta.at("delta").get<double>();
    snap.state.t = meta.at("t").get<double>();
    snap.state.scheme = scheme_from_string(meta.at("scheme").get<std::string>());
    snap.step = meta.value("step", std::int64_t{0});
    snap.dissipation_accum = meta.value("dissipation_accum", 0.0);
    snap.lambda_mass = meta.value("lambda_mass", 0.0);
  } catch (const json::exception& e) {
    throw IoError(dir.string() + "/meta.json: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(dir.string() + "/meta.json: " + e.what());
  }

  const fs::path field_path = dir / "field.f64";
  std::ifstream is(field_path, std::ios::binary);
  if (!is) throw IoError("cannot open " + field_path.string());
  auto& values = snap.state.field.values;
  std::vector<std::uint64_t> raw(values.size());
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  if (static_cast<std::size_t>(is.gcount()) != raw.size() * sizeof(std::uint64_t) || is.peek() != EOF) {
    throw IoError(field_path.string() + ": size does not match the grid");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) values[i] = std::bit_cast<double>(to_little(raw[i]));
  return snap;
}

std::vector<fs::path> list_snapshots(const fs::path& run_dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(run_dir)) throw IoError(run_dir.string() + " is not a directory");
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && name.rfind("snap_", 0) == 0) out.push_back(entry.path());
  }
  // Zero-padded names sort by step; longer names mean larger steps.
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    const auto sa = a.filename().string();
    const auto sb = b.filename().string();
    return sa.size() != sb.size() ? sa.size() < sb.size() : sa < sb;
  });
  return out;
}

}  // namespace obstacle_mcf
