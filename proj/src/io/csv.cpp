#include "motility/io/csv.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

namespace motility::io {

namespace {

using enum ColumnType;

Schema make(std::string id, std::vector<std::pair<std::string, ColumnType>> cols) {
  Schema s;
  s.id = std::move(id);
  for (auto& [name, type] : cols) {
    s.columns.push_back(name);
    s.types.push_back(type);
  }
  return s;
}

const std::map<std::string, Schema, std::less<>>& registry() {
  static const std::map<std::string, Schema, std::less<>> r = [] {
    std::vector<Schema> all = {
        make("profile", {{"z", Real}, {"theta0", Real}, {"dtheta0", Real}}),
        make("kernel", {{"z", Real}, {"psi0", Real}}),
        make("phi", {{"V", Real}, {"phi", Real}, {"phi_prime", Real}}),
        make("roots", {{"F", Real}, {"V", Real}, {"stable", Integer}}),
        make("tw_roots", {{"beta", Real}, {"V", Real}}),
        make("beta_critical", {{"beta_bisection", Real}, {"beta_closed_form", Real}, {"c0", Real},
                               {"phi_prime_ref", Real}}),
        make("hysteresis", {{"t", Real}, {"F", Real}, {"V", Real}, {"branch", Integer}, {"jump_flag", Integer}}),
        make("jumps", {{"t", Real}, {"F", Real}, {"V_before", Real}, {"V_after", Real}}),
        make("folds", {{"V", Real}, {"F", Real}}),
        make("stability", {{"V", Real}, {"beta", Real}, {"max_real", Real}, {"stable", Integer},
                           {"phi_prime", Real}, {"c0", Real}}),
        make("track", {{"t", Real}, {"x", Real}, {"V_est", Real}, {"F", Real}}),
        make("snapshot", {{"x", Real}, {"rho", Real}, {"P", Real}}),
        make("snapshot_index", {{"index", Integer}, {"t", Real}}),
        make("residuals", {{"t", Real}, {"u_norm", Real}}),
        make("cell_track", {{"t", Real}, {"x_back", Real}, {"x_front", Real}, {"mass", Real}, {"lambda", Real}}),
        make("monitors", {{"t", Real}, {"mass", Real}, {"E", Real}, {"F", Real}, {"rho_min", Real},
                          {"rho_max", Real}, {"lambda", Real}}),
        make("contours", {{"t", Real}, {"point_index", Integer}, {"x", Real}, {"y", Real}}),
        make("curve", {{"t", Real}, {"node", Integer}, {"x", Real}, {"y", Real}, {"V", Real}, {"kappa", Real},
                       {"lambda", Real}}),
    };
    std::map<std::string, Schema, std::less<>> m;
    for (auto& s : all) m.emplace(s.id, std::move(s));
    return m;
  }();
  return r;
}

void check_row(const Schema& s, const Row& cells) {
  if (cells.size() != s.columns.size()) {
    std::ostringstream os;
    os << "csv '" << s.id << "': row has " << cells.size() << " cells, schema has " << s.columns.size();
    throw SchemaError(os.str());
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const bool is_real = std::holds_alternative<double>(cells[k]);
    if (is_real != (s.types[k] == Real))
      throw SchemaError("csv '" + s.id + "': column " + s.columns[k] + " expects " +
                        (s.types[k] == Real ? "a real" : "an integer"));
    if (is_real && !std::isfinite(std::get<double>(cells[k])))
      throw SchemaError("csv '" + s.id + "': non-finite value in column " + s.columns[k]);
  }
}

void append_cells(std::string& line, const Row& cells) {
  line.clear();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) line += ',';
    if (const double* d = std::get_if<double>(&cells[k])) line += format_csv_real(*d);
    else line += std::to_string(std::get<std::int64_t>(cells[k]));
  }
  line += '\n';
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc | mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void put_le(std::ostream& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_le(std::istream& in) {
  std::uint64_t bits = 0;
  in.read(reinterpret_cast<char*>(&bits), sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string Schema::header() const {
  std::string h;
  for (std::size_t k = 0; k < columns.size(); ++k) h += (k ? "," : "") + columns[k];
  return h;
}

const Schema& schema(std::string_view id) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw std::invalid_argument("unknown csv schema '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> schema_ids() {
  std::vector<std::string> ids;
  for (const auto& [k, v] : registry()) ids.push_back(k);
  return ids;
}

std::string format_csv_real(double x) {
  if (!std::isfinite(x)) throw SchemaError("csv: non-finite value");
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, p);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view schema_id)
    : schema_(&schema(schema_id)), path_(path), out_(open_out(path)) {
  out_ << schema_->header() << '\n';
}

void CsvWriter::row(const Row& cells) {
  check_row(*schema_, cells);
  append_cells(line_, cells);
  out_ << line_;
  ++rows_;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("error writing " + path_.string());
}

void write_csv(const std::filesystem::path& path, std::string_view schema_id, const std::vector<Row>& rows) {
  const Schema& s = schema(schema_id);
  for (const auto& r : rows) check_row(s, r);
  CsvWriter w(path, schema_id);
  for (const auto& r : rows) w.row(r);
  w.close();
}

std::size_t CsvTable::index(std::string_view name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return k;
  throw std::invalid_argument("csv: no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column(std::string_view name) const {
  const auto k = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

CsvTable read_csv(const std::filesystem::path& path, std::string_view schema_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv " + path.string() + ": missing header");
  {
    std::string_view h = line;
    while (true) {
      const auto c = h.find(',');
      t.columns.emplace_back(h.substr(0, c));
      if (c == std::string_view::npos) break;
      h.remove_prefix(c + 1);
    }
  }
  if (!schema_id.empty() && line != schema(schema_id).header())
    throw SchemaError("csv " + path.string() + ": header '" + line + "' does not match schema '" +
                      std::string(schema_id) + "'");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<double> r;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      const auto [q, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw SchemaError("csv " + path.string() + ":" + std::to_string(line_no) + ": bad number");
      r.push_back(v);
      if (q == end) break;
      if (*q != ',') throw SchemaError("csv " + path.string() + ":" + std::to_string(line_no) + ": bad separator");
      p = q + 1;
    }
    if (r.size() != t.columns.size())
      throw SchemaError("csv " + path.string() + ":" + std::to_string(line_no) + ": wrong number of cells");
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_field_snapshot(const std::filesystem::path& path, const FieldState2D& s) {
  const std::size_t n = s.nx * s.ny;
  if (s.rho.size() != n || s.Px.size() != n || s.Py.size() != n)
    throw std::invalid_argument("write_field_snapshot: field sizes do not match nx*ny");
  auto out = open_out(path);
  out << "motility-field2d 1\n"
      << "nx " << s.nx << "\n"
      << "ny " << s.ny << "\n"
      << "dx " << format_csv_real(s.dx) << "\n"
      << "t " << format_csv_real(s.t) << "\n"
      << "eps " << format_csv_real(s.eps) << "\n"
      << "beta " << format_csv_real(s.beta) << "\n"
      << "fields rho Px Py\n"
      << "end\n";
  for (const auto* f : {&s.rho, &s.Px, &s.Py})
    for (double x : *f) put_le(out, x);
  out.close();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

FieldState2D read_field_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::map<std::string, std::string> header;
  std::string line;
  std::getline(in, line);
  if (line != "motility-field2d 1") throw std::runtime_error(path.string() + ": not a field snapshot");
  while (std::getline(in, line) && line != "end") {
    const auto sp = line.find(' ');
    header[line.substr(0, sp)] = sp == std::string::npos ? "" : line.substr(sp + 1);
  }
  if (line != "end" || header["fields"] != "rho Px Py")
    throw std::runtime_error(path.string() + ": malformed snapshot header");
  auto num = [&](const char* key) {
    const auto it = header.find(key);
    double v = 0.0;
    if (it == header.end() ||
        std::from_chars(it->second.data(), it->second.data() + it->second.size(), v).ec != std::errc())
      throw std::runtime_error(path.string() + ": bad header field " + key);
    return v;
  };
  FieldState2D s = make_state_2d(static_cast<std::size_t>(num("nx")), static_cast<std::size_t>(num("ny")),
                                 num("dx"), num("eps"), num("beta"));
  s.t = num("t");
  for (auto* f : {&s.rho, &s.Px, &s.Py})
    for (double& x : *f) x = get_le(in);
  if (!in) throw std::runtime_error(path.string() + ": truncated snapshot");
  return s;
}

}  // namespace motility::io
