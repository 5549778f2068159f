#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "affordkit/errors.hpp"

namespace affordkit {

using ojson = nlohmann::ordered_json;

// All floating point numbers in output files are printed with exactly six
// decimals, and object keys keep insertion order, so two runs with the same
// seed produce byte-identical files.
inline std::string format_float6(double x) {
  if (!std::isfinite(x)) throw DataError("non-finite number in JSON output");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

namespace detail {

inline void dump_fixed_rec(const ojson& v, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (v.type()) {
    case ojson::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        out += ojson(it.key()).dump();
        out += ": ";
        dump_fixed_rec(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case ojson::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_fixed_rec(el, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case ojson::value_t::string:
      out += v.dump();  // nlohmann handles escaping
      return;
    case ojson::value_t::number_float:
      out += format_float6(v.get<double>());
      return;
    default:
      out += v.dump();  // integers, booleans, null
      return;
  }
}

inline void dump_fixed_compact_rec(const ojson& v, std::string& out) {
  switch (v.type()) {
    case ojson::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ojson(it.key()).dump();
        out += ':';
        dump_fixed_compact_rec(it.value(), out);
      }
      out += '}';
      return;
    }
    case ojson::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& el : v) {
        if (!first) out += ',';
        first = false;
        dump_fixed_compact_rec(el, out);
      }
      out += ']';
      return;
    }
    case ojson::value_t::string:
      out += v.dump();
      return;
    case ojson::value_t::number_float:
      out += format_float6(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace detail

inline std::string dump_fixed(const ojson& v, int indent = 2) {
  std::string out;
  detail::dump_fixed_rec(v, out, indent, 0);
  out += "\n";
  return out;
}

// Single-line form for JSONL records; same fixed float formatting.
inline std::string dump_fixed_compact(const ojson& v) {
  std::string out;
  detail::dump_fixed_compact_rec(v, out);
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ojson read_json_file(const std::filesystem::path& path) {
  try {
    return ojson::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("JSON parse error in " + path.string() + ": " + e.what());
  }
}

// Write via a temp file and rename, so failed runs leave no partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out << content;
    if (!out.good()) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace affordkit
