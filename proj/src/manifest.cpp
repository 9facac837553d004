#include "rockperm/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "rockperm/errors.hpp"

namespace rockperm {

namespace {

const std::vector<std::string> kColumns = {
    "id",         "file",          "parent",      "origin_x",     "origin_y",  "origin_z",
    "rotation",   "flow_axis",     "porosity",    "face_count",   "area_m2",   "specific_area_per_m",
    "f_max",      "permeable",     "status",      "k_cmp_mD",     "k_baseline_mD", "k_prd_mD",
    "iterations", "residual",      "split",       "error"};

std::string quote(std::string_view cell) {
  if (cell.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw FormatError("manifest line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(std::move(cell));
  return cells;
}

template <typename T>
T parse_number(std::string_view text, std::string_view column, std::size_t line_no) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw FormatError("manifest line " + std::to_string(line_no) + ": bad value '" + std::string(text) +
                      "' in column " + std::string(column));
  return value;
}

template <typename T>
std::optional<T> parse_optional(std::string_view text, std::string_view column, std::size_t line_no) {
  if (text.empty()) return std::nullopt;
  return parse_number<T>(text, column, line_no);
}

std::string optional_text(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void parse_metadata(const std::string& line, Manifest& m) {
  std::istringstream in(line.substr(1));
  std::string word;
  in >> word;
  if (word != "rockperm-manifest") throw FormatError("manifest: missing 'rockperm-manifest' metadata line");
  bool has_schema = false;
  while (in >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = word.substr(0, eq);
    const std::string value = word.substr(eq + 1);
    if (key == "schema") {
      m.schema = parse_number<int>(value, key, 1);
      has_schema = true;
    } else if (key == "voxel_edge") {
      m.voxel_edge = parse_number<double>(value, key, 1);
    } else if (key == "size") {
      m.size = parse_number<int>(value, key, 1);
    } else if (key == "stride") {
      m.stride = parse_number<int>(value, key, 1);
    } else if (key == "units") {
      m.units = value;
    }
  }
  if (!has_schema) throw FormatError("manifest: metadata line lacks schema version");
  if (m.schema > manifest_schema_version)
    throw FormatError("manifest: schema " + std::to_string(m.schema) + " is newer than supported (" +
                      std::to_string(manifest_schema_version) + ")");
  if (m.units != "mD") throw FormatError("manifest: unsupported permeability units '" + m.units + "'");
}

}  // namespace

std::string_view to_string(SampleStatus status) {
  switch (status) {
    case SampleStatus::pending: return "pending";
    case SampleStatus::labeled: return "labeled";
    case SampleStatus::impermeable: return "impermeable";
    case SampleStatus::failed: return "failed";
  }
  return "pending";
}

SampleStatus parse_status(std::string_view text) {
  if (text == "pending" || text.empty()) return SampleStatus::pending;
  if (text == "labeled") return SampleStatus::labeled;
  if (text == "impermeable") return SampleStatus::impermeable;
  if (text == "failed") return SampleStatus::failed;
  throw FormatError("unknown sample status '" + std::string(text) + "'");
}

const std::vector<std::string>& manifest_columns() { return kColumns; }

const SampleRecord* Manifest::find(std::string_view id) const {
  for (const auto& r : rows)
    if (r.id == id) return &r;
  return nullptr;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Manifest read_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw FormatError("manifest: empty input");
  ++line_no;
  if (line.empty() || line[0] != '#') throw FormatError("manifest: first line must be the metadata comment");
  parse_metadata(line, m);

  if (!std::getline(in, line)) throw FormatError("manifest: missing column header");
  ++line_no;
  const auto header = split_csv(line, line_no);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!pos.emplace(header[i], i).second) throw FormatError("manifest: duplicate column '" + header[i] + "'");
    if (std::find(kColumns.begin(), kColumns.end(), header[i]) == kColumns.end())
      m.extra_columns.push_back(header[i]);
  }
  for (const char* required : {"id", "file"})
    if (!pos.count(required)) throw FormatError(std::string("manifest: missing required column '") + required + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line, line_no);
    if (cells.size() != header.size())
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                        " cells, found " + std::to_string(cells.size()));
    auto get = [&](const char* name) -> std::string_view {
      const auto it = pos.find(name);
      return it == pos.end() ? std::string_view() : std::string_view(cells[it->second]);
    };

    SampleRecord r;
    r.id = get("id");
    r.file = get("file");
    r.parent = get("parent");
    if (r.id.empty()) throw FormatError("manifest line " + std::to_string(line_no) + ": empty id");
    r.meta.origin = {parse_optional<int>(get("origin_x"), "origin_x", line_no).value_or(0),
                     parse_optional<int>(get("origin_y"), "origin_y", line_no).value_or(0),
                     parse_optional<int>(get("origin_z"), "origin_z", line_no).value_or(0)};
    try {
      if (!get("rotation").empty()) r.meta.rotation = parse_rotation(get("rotation"));
      r.meta.flow_axis = get("flow_axis").empty() ? flow_axis_of(r.meta.rotation) : parse_axis(get("flow_axis"));
    } catch (const FormatError& e) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    r.porosity = parse_optional<double>(get("porosity"), "porosity", line_no).value_or(0.0);
    r.face_count = parse_optional<std::int64_t>(get("face_count"), "face_count", line_no).value_or(0);
    r.area_m2 = parse_optional<double>(get("area_m2"), "area_m2", line_no).value_or(0.0);
    r.specific_area = parse_optional<double>(get("specific_area_per_m"), "specific_area_per_m", line_no).value_or(0.0);
    r.f_max = parse_optional<std::int64_t>(get("f_max"), "f_max", line_no).value_or(0);
    r.status = parse_status(get("status"));
    r.k_cmp_mD = parse_optional<double>(get("k_cmp_mD"), "k_cmp_mD", line_no);
    r.k_baseline_mD = parse_optional<double>(get("k_baseline_mD"), "k_baseline_mD", line_no);
    r.k_prd_mD = parse_optional<double>(get("k_prd_mD"), "k_prd_mD", line_no);
    r.iterations = parse_optional<int>(get("iterations"), "iterations", line_no);
    r.residual = parse_optional<double>(get("residual"), "residual", line_no);
    r.split = get("split");
    r.error = get("error");
    for (const auto& name : m.extra_columns) r.extra.emplace_back(name, cells[pos[name]]);
    m.rows.push_back(std::move(r));
  }

  std::vector<std::string_view> ids;
  for (const auto& r : m.rows) ids.push_back(r.id);
  std::sort(ids.begin(), ids.end());
  if (const auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end())
    throw FormatError("manifest: duplicate sample id '" + std::string(*dup) + "'");
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  try {
    return read_manifest(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_manifest(const Manifest& m, std::ostream& out) {
  out << "# rockperm-manifest schema=" << manifest_schema_version << " voxel_edge=" << format_number(m.voxel_edge)
      << " size=" << m.size << " stride=" << m.stride << " units=" << m.units << '\n';
  for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
  for (const auto& c : m.extra_columns) out << ',' << quote(c);
  out << '\n';

  for (const auto& r : m.rows) {
    const std::vector<std::string> cells = {
        r.id,
        r.file,
        r.parent,
        std::to_string(r.meta.origin[0]),
        std::to_string(r.meta.origin[1]),
        std::to_string(r.meta.origin[2]),
        std::string(to_string(r.meta.rotation)),
        std::string(to_string(r.meta.flow_axis)),
        format_number(r.porosity),
        std::to_string(r.face_count),
        format_number(r.area_m2),
        format_number(r.specific_area),
        std::to_string(r.f_max),
        r.permeable() ? "1" : "0",
        std::string(to_string(r.status)),
        optional_text(r.k_cmp_mD),
        optional_text(r.k_baseline_mD),
        optional_text(r.k_prd_mD),
        r.iterations ? std::to_string(*r.iterations) : std::string(),
        optional_text(r.residual),
        r.split,
        r.error,
    };
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote(cells[i]);
    for (const auto& name : m.extra_columns) {
      std::string_view value;
      for (const auto& [k, v] : r.extra)
        if (k == name) value = v;
      out << ',' << quote(value);
    }
    out << '\n';
  }
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write manifest " + tmp.string());
    write_manifest(m, out);
    if (!out) throw FormatError("failed writing manifest " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rockperm
