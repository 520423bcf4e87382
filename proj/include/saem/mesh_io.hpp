#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "saem/mesh.hpp"

namespace saem {

enum class MeshFormat { Obj, Off, Auto };

/// Parses "obj", "off" or "auto" (case-insensitive). Throws std::invalid_argument.
MeshFormat parse_mesh_format(std::string_view name);

/// Unvalidated vertex/face arrays as read from a file.
struct RawMesh {
  Points vertices;
  FaceIndices faces;
};

/// Wavefront OBJ: `v` and triangular `f` records with 1-based (or negative
/// relative) indices. vt/vn/material/group records are ignored; faces with more
/// than three corners are rejected. Throws MeshError on malformed input.
RawMesh parse_obj(std::istream& in);
/// ASCII OFF with triangular faces only. Throws MeshError on malformed input.
RawMesh parse_off(std::istream& in);

/// Reads a file without validating topology. Throws IoError if it cannot be opened.
RawMesh read_raw_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto);

/// Reads and validates a mesh; vertex order is preserved from the file.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto);

/// Shortest form that still carries 17 significant digits.
std::string format_coordinate(double value);

/// Writers emit 17 significant digits so that values round-trip exactly.
/// `comments` become leading `#` lines. Throws IoError on failure.
void write_obj(const std::filesystem::path& path, const Points& vertices, const FaceIndices& faces,
               const std::vector<std::string>& comments = {});
void write_off(const std::filesystem::path& path, const Points& vertices, const FaceIndices& faces,
               const std::vector<std::string>& comments = {});
void write_mesh(const std::filesystem::path& path, const TriMesh& mesh, MeshFormat format = MeshFormat::Auto,
                const std::vector<std::string>& comments = {});

}  // namespace saem
