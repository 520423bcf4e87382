#include "saem/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "saem/errors.hpp"

namespace saem {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

double parse_double(std::string_view token, int line) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw MeshError("line " + std::to_string(line) + ": invalid number '" + std::string(token) + "'");
  }
  return value;
}

long parse_integer(std::string_view token, int line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw MeshError("line " + std::to_string(line) + ": invalid index '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

RawMesh to_raw(const std::vector<Vec3>& verts, const std::vector<std::array<int, 3>>& faces) {
  RawMesh raw;
  raw.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) raw.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  raw.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (size_t i = 0; i < faces.size(); ++i) {
    for (int c = 0; c < 3; ++c) raw.faces(static_cast<Eigen::Index>(i), c) = faces[i][c];
  }
  return raw;
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace

MeshFormat parse_mesh_format(std::string_view name) {
  const std::string s = lower(name);
  if (s == "obj") return MeshFormat::Obj;
  if (s == "off") return MeshFormat::Off;
  if (s == "auto") return MeshFormat::Auto;
  throw std::invalid_argument("unknown mesh format '" + std::string(name) + "'");
}

RawMesh parse_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) throw MeshError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
      verts.emplace_back(parse_double(tokens[1], line_no), parse_double(tokens[2], line_no),
                         parse_double(tokens[3], line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() != 4) {
        throw MeshError("line " + std::to_string(line_no) + ": face with " + std::to_string(tokens.size() - 1) +
                        " corners; only triangles are supported");
      }
      std::array<int, 3> face{};
      for (int c = 0; c < 3; ++c) {
        std::string_view t = tokens[c + 1];
        t = t.substr(0, t.find('/'));
        long idx = parse_integer(t, line_no);
        if (idx == 0) throw MeshError("line " + std::to_string(line_no) + ": face index 0 is invalid");
        // negative indices count back from the last vertex read so far
        idx = idx > 0 ? idx - 1 : static_cast<long>(verts.size()) + idx;
        face[c] = static_cast<int>(idx);
      }
      faces.push_back(face);
    }
  }
  if (in.bad()) throw IoError("read error");
  return to_raw(verts, faces);
}

RawMesh parse_off(std::istream& in) {
  // Comment-stripped token stream.
  std::vector<std::string> tokens;
  std::vector<int> token_lines;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (auto t : split(line)) {
      tokens.emplace_back(t);
      token_lines.push_back(line_no);
    }
  }
  size_t pos = 0;
  auto next = [&]() -> std::pair<std::string_view, int> {
    if (pos >= tokens.size()) throw MeshError("unexpected end of OFF file");
    const size_t p = pos++;
    return {tokens[p], token_lines[p]};
  };
  auto [header, header_line] = next();
  if (header != "OFF") throw MeshError("line " + std::to_string(header_line) + ": missing OFF header");
  auto [nv_tok, l1] = next();
  auto [nf_tok, l2] = next();
  next();  // edge count, unused
  const long nv = parse_integer(nv_tok, l1);
  const long nf = parse_integer(nf_tok, l2);
  if (nv < 0 || nf < 0) throw MeshError("negative element count in OFF header");

  std::vector<Vec3> verts(static_cast<size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    for (int c = 0; c < 3; ++c) {
      auto [tok, l] = next();
      verts[i][c] = parse_double(tok, l);
    }
  }
  // Face records may carry trailing colour values; consume by line.
  std::vector<std::array<int, 3>> faces(static_cast<size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    auto [count_tok, l] = next();
    const long count = parse_integer(count_tok, l);
    if (count != 3) {
      throw MeshError("line " + std::to_string(l) + ": face with " + std::to_string(count) +
                      " corners; only triangles are supported");
    }
    for (int c = 0; c < 3; ++c) {
      auto [tok, lc] = next();
      faces[i][c] = static_cast<int>(parse_integer(tok, lc));
    }
    while (pos < tokens.size() && token_lines[pos] == l) ++pos;
  }
  return to_raw(verts, faces);
}

RawMesh read_raw_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  if (format == MeshFormat::Auto) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".off") {
      format = MeshFormat::Off;
    } else if (ext == ".obj") {
      format = MeshFormat::Obj;
    } else {
      std::string first;
      in >> first;
      format = first == "OFF" ? MeshFormat::Off : MeshFormat::Obj;
      in.clear();
      in.seekg(0);
    }
  }
  return format == MeshFormat::Off ? parse_off(in) : parse_obj(in);
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  RawMesh raw = read_raw_mesh(path, format);
  return TriMesh(std::move(raw.vertices), std::move(raw.faces));
}

std::string format_coordinate(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("coordinate formatting failed");
  return std::string(buf, ptr);
}

void write_obj(const std::filesystem::path& path, const Points& vertices, const FaceIndices& faces,
               const std::vector<std::string>& comments) {
  std::ostringstream out;
  write_comments(out, comments);
  for (Eigen::Index i = 0; i < vertices.rows(); ++i) {
    out << "v " << format_coordinate(vertices(i, 0)) << ' ' << format_coordinate(vertices(i, 1)) << ' '
        << format_coordinate(vertices(i, 2)) << '\n';
  }
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    out << "f " << faces(f, 0) + 1 << ' ' << faces(f, 1) + 1 << ' ' << faces(f, 2) + 1 << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  file << out.str();
  if (!file) throw IoError("write failed for '" + path.string() + "'");
}

void write_off(const std::filesystem::path& path, const Points& vertices, const FaceIndices& faces,
               const std::vector<std::string>& comments) {
  std::ostringstream out;
  out << "OFF\n";
  write_comments(out, comments);
  out << vertices.rows() << ' ' << faces.rows() << " 0\n";
  for (Eigen::Index i = 0; i < vertices.rows(); ++i) {
    out << format_coordinate(vertices(i, 0)) << ' ' << format_coordinate(vertices(i, 1)) << ' '
        << format_coordinate(vertices(i, 2)) << '\n';
  }
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    out << "3 " << faces(f, 0) << ' ' << faces(f, 1) << ' ' << faces(f, 2) << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  file << out.str();
  if (!file) throw IoError("write failed for '" + path.string() + "'");
}

void write_mesh(const std::filesystem::path& path, const TriMesh& mesh, MeshFormat format,
                const std::vector<std::string>& comments) {
  if (format == MeshFormat::Auto) {
    format = lower(path.extension().string()) == ".off" ? MeshFormat::Off : MeshFormat::Obj;
  }
  if (format == MeshFormat::Off) {
    write_off(path, mesh.vertices(), mesh.faces(), comments);
  } else {
    write_obj(path, mesh.vertices(), mesh.faces(), comments);
  }
}

}  // namespace saem
