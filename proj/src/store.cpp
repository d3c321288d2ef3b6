#include "ict/store.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <json.hpp>

namespace ict {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[6] = {'I', 'C', 'T', 'B', '1', '\n'};
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kHeaderLenBytes = 8;

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "f64") return 8;
  if (dtype == "c128") return 16;
  throw store_error("unsupported dtype '" + dtype + "'");
}

ordered_json path_to_json(const Path& p) {
  ordered_json j;
  j["term"] = p.term_index;
  j["start"] = p.start.doubled();
  ordered_json bridges = ordered_json::array(), results = ordered_json::array();
  for (const auto& s : p.steps) {
    bridges.push_back(s.bridge.doubled());
    results.push_back(s.result.doubled());
  }
  j["bridges"] = bridges;
  j["results"] = results;
  j["parity"] = p.terminal_parity;
  return j;
}

Path path_from_json(const ordered_json& j) {
  Path p;
  p.term_index = j.at("term").get<int>();
  p.start = Weight::from_doubled(j.at("start").get<int>());
  const auto& bridges = j.at("bridges");
  const auto& results = j.at("results");
  if (bridges.size() != results.size()) throw store_error("path bridges/results length mismatch");
  for (std::size_t i = 0; i < bridges.size(); ++i)
    p.steps.push_back({Weight::from_doubled(bridges[i].get<int>()),
                       Weight::from_doubled(results[i].get<int>())});
  p.terminal_parity = j.at("parity").get<int>();
  return p;
}

std::vector<unsigned char> blob_bytes(const StoredObject& obj) {
  const std::size_t esz = dtype_size(obj.dtype);
  const Eigen::Index r = obj.rows(), c = obj.cols();
  std::vector<unsigned char> out(static_cast<std::size_t>(r) * c * esz);
  unsigned char* dst = out.data();
  // row-major, little-endian (native on every supported target)
  if (obj.dtype == "f64") {
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) {
        const double v = obj.f64(i, j);
        std::memcpy(dst, &v, 8);
        dst += 8;
      }
  } else {
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) {
        const double re = obj.c128(i, j).real(), im = obj.c128(i, j).imag();
        std::memcpy(dst, &re, 8);
        std::memcpy(dst + 8, &im, 8);
        dst += 16;
      }
  }
  return out;
}

std::uint32_t crc_of(const std::vector<unsigned char>& bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, bytes.empty() ? Z_NULL : bytes.data(), static_cast<uInt>(bytes.size())));
}

}  // namespace

void save_container(const std::string& file, const ContainerMeta& meta,
                    const std::vector<StoredObject>& objects) {
  std::vector<std::vector<unsigned char>> blobs;
  blobs.reserve(objects.size());
  ordered_json jobs = ordered_json::array();
  std::uint64_t offset = 0;
  for (const auto& obj : objects) {
    blobs.push_back(blob_bytes(obj));
    const auto& bytes = blobs.back();
    ordered_json j;
    j["name"] = obj.name;
    j["kind"] = obj.kind;
    j["path"] = obj.path ? path_to_json(*obj.path) : ordered_json(nullptr);
    if (obj.path_in) j["path_in"] = path_to_json(*obj.path_in);
    j["shape"] = {obj.rows(), obj.cols()};
    j["dtype"] = obj.dtype;
    j["byte_offset"] = offset;
    j["byte_length"] = bytes.size();
    j["crc32"] = crc_of(bytes);
    jobs.push_back(std::move(j));
    offset += bytes.size();
    offset = (offset + 7) & ~std::uint64_t(7);  // next blob 8-byte aligned
  }

  ordered_json header;
  header["format_version"] = meta.format_version;
  header["group"] = group_name(meta.group);
  header["space_spec"] = meta.space_spec;
  if (meta.space_spec_out) header["space_spec_out"] = *meta.space_spec_out;
  header["basis"] = meta.basis;
  header["weight_encoding"] = "doubled";
  header["objects"] = std::move(jobs);

  std::string htext = header.dump();
  // pad so the payload base (magic + length field + header) is 8-byte aligned
  while ((kMagicLen + kHeaderLenBytes + htext.size()) % 8 != 0) htext.push_back(' ');

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw store_error("cannot open '" + file + "' for writing");
  out.write(kMagic, kMagicLen);
  const std::uint64_t hlen = htext.size();
  unsigned char lenbuf[8];
  for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<unsigned char>((hlen >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(lenbuf), 8);
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));

  std::uint64_t written = 0;
  for (const auto& bytes : blobs) {
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    written += bytes.size();
    static const char zeros[8] = {0};
    const std::uint64_t aligned = (written + 7) & ~std::uint64_t(7);
    out.write(zeros, static_cast<std::streamsize>(aligned - written));
    written = aligned;
  }
  if (!out) throw store_error("write failed for '" + file + "'");
}

Container load_container(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw store_error("cannot open '" + file + "'");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (data.size() < kMagicLen + kHeaderLenBytes || std::memcmp(data.data(), kMagic, kMagicLen) != 0)
    throw store_error("bad magic: not an ICTB1 container");
  std::uint64_t hlen = 0;
  for (int i = 0; i < 8; ++i) hlen |= std::uint64_t(data[kMagicLen + i]) << (8 * i);
  const std::uint64_t payload_base = kMagicLen + kHeaderLenBytes + hlen;
  if (payload_base > data.size()) throw store_error("truncated header");

  ordered_json header;
  try {
    header = ordered_json::parse(data.begin() + kMagicLen + kHeaderLenBytes,
                                 data.begin() + static_cast<std::ptrdiff_t>(payload_base));
  } catch (const std::exception& e) {
    throw store_error(std::string("header JSON parse failure: ") + e.what());
  }

  Container c;
  c.meta.format_version = header.at("format_version").get<int>();
  if (c.meta.format_version != 1)
    throw store_error("unsupported format_version " + std::to_string(c.meta.format_version));
  const std::string g = header.at("group").get<std::string>();
  if (g == "O3") c.meta.group = Group::O3;
  else if (g == "SO3") c.meta.group = Group::SO3;
  else if (g == "SU2") c.meta.group = Group::SU2;
  else throw store_error("unknown group '" + g + "'");
  c.meta.space_spec = header.at("space_spec").get<std::string>();
  if (header.contains("space_spec_out"))
    c.meta.space_spec_out = header.at("space_spec_out").get<std::string>();
  c.meta.basis = header.at("basis").get<std::string>();

  const std::uint64_t payload_len = data.size() - payload_base;
  std::uint64_t prev_end = 0;
  for (const auto& j : header.at("objects")) {
    StoredObject obj;
    obj.name = j.at("name").get<std::string>();
    obj.kind = j.at("kind").get<std::string>();
    if (!j.at("path").is_null()) obj.path = path_from_json(j.at("path"));
    if (j.contains("path_in")) obj.path_in = path_from_json(j.at("path_in"));
    obj.dtype = j.at("dtype").get<std::string>();
    const auto shape = j.at("shape");
    if (shape.size() != 2) throw store_error("shape must be [rows, cols]", obj.name);
    const Eigen::Index r = shape[0].get<Eigen::Index>(), cc = shape[1].get<Eigen::Index>();
    const std::uint64_t off = j.at("byte_offset").get<std::uint64_t>();
    const std::uint64_t len = j.at("byte_length").get<std::uint64_t>();
    const std::uint32_t crc = j.at("crc32").get<std::uint32_t>();

    if (off % 8 != 0) throw store_error("misaligned blob", obj.name);
    if (off < prev_end) throw store_error("overlapping blob layout", obj.name);
    if (off + len > payload_len) throw store_error("blob extends past end of file", obj.name);
    const std::size_t esz = dtype_size(obj.dtype);
    if (len != static_cast<std::uint64_t>(r) * cc * esz)
      throw store_error("byte_length inconsistent with shape", obj.name);
    prev_end = off + len;

    const unsigned char* src = data.data() + payload_base + off;
    const std::uint32_t actual =
        static_cast<std::uint32_t>(crc32(0L, len ? src : Z_NULL, static_cast<uInt>(len)));
    if (actual != crc) throw store_error("crc32 mismatch", obj.name);

    if (obj.kind == "path_matrix" && obj.path && cc != obj.path->terminal().dim())
      throw store_error("path_matrix column count does not match terminal weight", obj.name);

    if (obj.dtype == "f64") {
      obj.f64.resize(r, cc);
      for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index k = 0; k < cc; ++k) {
          double v;
          std::memcpy(&v, src + (static_cast<std::size_t>(i) * cc + k) * 8, 8);
          obj.f64(i, k) = v;
        }
    } else {
      obj.c128.resize(r, cc);
      for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index k = 0; k < cc; ++k) {
          double re, im;
          std::memcpy(&re, src + (static_cast<std::size_t>(i) * cc + k) * 16, 8);
          std::memcpy(&im, src + (static_cast<std::size_t>(i) * cc + k) * 16 + 8, 8);
          obj.c128(i, k) = {re, im};
        }
    }
    c.objects.push_back(std::move(obj));
  }
  return c;
}

}  // namespace ict
