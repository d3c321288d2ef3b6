#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ict/types.hpp"

namespace ict {

/// One payload blob plus its metadata. Exactly one of f64/c128 is used,
/// selected by dtype. Matrices are serialized row-major little-endian.
struct StoredObject {
  std::string name;
  std::string kind;  // path_matrix | projector_dense | basis_element | mix_shape
  std::optional<Path> path;     // construction provenance (out path for basis elements)
  std::optional<Path> path_in;  // basis elements only
  std::string dtype;            // "f64" | "c128"
  MatD f64;
  MatC c128;

  Eigen::Index rows() const { return dtype == "c128" ? c128.rows() : f64.rows(); }
  Eigen::Index cols() const { return dtype == "c128" ? c128.cols() : f64.cols(); }
};

struct ContainerMeta {
  int format_version = 1;
  Group group = Group::O3;
  std::string space_spec;                     // canonical text of the (input) space
  std::optional<std::string> space_spec_out;  // present for Hom containers
  std::string basis = "spherical";            // "cartesian" | "spherical"
};

/// Container layout (format_version 1):
///   magic "ICTB1\n" | header_length (8-byte LE) | UTF-8 JSON header | payload
/// The header is space-padded so the payload starts 8-byte aligned; every
/// blob offset is 8-byte aligned and CRC32-protected. Identical inputs
/// produce byte-identical files.
void save_container(const std::string& file, const ContainerMeta& meta,
                    const std::vector<StoredObject>& objects);

struct Container {
  ContainerMeta meta;
  std::vector<StoredObject> objects;
};

/// Validates magic, header, alignment, layout and CRCs before returning;
/// failures throw store_error naming the first offending object.
Container load_container(const std::string& file);

}  // namespace ict
