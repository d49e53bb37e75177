#pragma once

// Hamiltonian file formats.
//
// Text (one item per line, '#' starts a comment):
//
//   n=3
//   0.5 XIZ
//   -1.0 ZZI KAPPA_I=1.5
//   BLOCK q=0,2 1,0 0,0 0,0 0,0  0,0 -1,0 2,0 0,0  0,0 2,0 -1,0 0,0  0,0 0,0 0,0 1,0
//
// A BLOCK line lists the 4^k entries of the 2^k x 2^k block row-major as
// "re,im" tokens. JSON files (".json") carry the same content:
//
//   {"n": 3, "terms": [{"pauli": "XIZ", "coeff": 0.5},
//                      {"qubits": [0, 2], "block": [[1, 0], [0, 0], ...], "kappa_i": 2.0}]}

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "dequant/errors.hpp"
#include "dequant/hamiltonian.hpp"

namespace dequant {

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline double parse_real(std::string_view text, std::size_t line, std::size_t column, const char* what) {
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value))
    throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line, column);
  return value;
}

inline unsigned long long parse_unsigned(std::string_view text, std::size_t line, std::size_t column,
                                         const char* what) {
  unsigned long long value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
    throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line, column);
  return value;
}

inline bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace detail

/// Parses the text format. Terms are validated; errors carry line and column.
inline Hamiltonian parse_hamiltonian_text(std::string_view text) {
  Hamiltonian h;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = detail::tokenize(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    if (!have_header) {
      const auto& t = tokens.front();
      if (tokens.size() != 1 || !detail::starts_with(t.text, "n="))
        throw ParseError("expected header 'n=<qubits>'", line_no, t.column);
      const auto n = detail::parse_unsigned(t.text.substr(2), line_no, t.column + 2, "qubit count");
      if (n == 0 || n > kMaxQubits)
        throw ParseError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]", line_no, t.column + 2);
      h.qubits = static_cast<unsigned>(n);
      have_header = true;
      continue;
    }

    LocalTerm term;
    if (detail::starts_with(tokens.back().text, "KAPPA_I=")) {
      const auto& t = tokens.back();
      term.kappa_override = detail::parse_real(t.text.substr(8), line_no, t.column + 8, "KAPPA_I value");
      tokens.pop_back();
    }

    if (tokens.front().text == "BLOCK") {
      if (tokens.size() < 2 || !detail::starts_with(tokens[1].text, "q="))
        throw ParseError("BLOCK needs a 'q=<qubit list>' field", line_no, tokens.front().column);
      BlockTerm block;
      std::string_view list = tokens[1].text.substr(2);
      std::size_t column = tokens[1].column + 2;
      while (true) {
        const std::size_t comma = list.find(',');
        const auto item = list.substr(0, comma);
        block.support.push_back(static_cast<unsigned>(detail::parse_unsigned(item, line_no, column, "qubit index")));
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
        column += comma + 1;
      }
      if (block.support.size() > 30) throw ParseError("BLOCK support too large", line_no, tokens[1].column);
      const std::size_t dim = std::size_t{1} << block.support.size();
      const std::size_t expected = dim * dim;
      if (tokens.size() - 2 != expected)
        throw ParseError("BLOCK on " + std::to_string(block.support.size()) + " qubits needs " +
                             std::to_string(expected) + " entries, found " + std::to_string(tokens.size() - 2),
                         line_no, tokens[1].column);
      block.block.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      for (std::size_t e = 0; e < expected; ++e) {
        const auto& t = tokens[e + 2];
        const auto comma = t.text.find(',');
        if (comma == std::string_view::npos)
          throw ParseError("block entry must be 're,im', got '" + std::string(t.text) + "'", line_no, t.column);
        const double re = detail::parse_real(t.text.substr(0, comma), line_no, t.column, "real part");
        const double im = detail::parse_real(t.text.substr(comma + 1), line_no, t.column + comma + 1, "imaginary part");
        block.block(static_cast<Eigen::Index>(e / dim), static_cast<Eigen::Index>(e % dim)) = Complex(re, im);
      }
      term.body = std::move(block);
    } else {
      if (tokens.size() != 2)
        throw ParseError("expected '<coefficient> <Pauli string>'", line_no, tokens.front().column);
      const double coeff = detail::parse_real(tokens[0].text, line_no, tokens[0].column, "coefficient");
      try {
        term.body = PauliTerm{coeff, PauliString(tokens[1].text)};
      } catch (const ParseError& e) {
        // PauliString reports a position within the string and no line.
        throw ParseError(e.what(), line_no, tokens[1].column + (e.column() ? e.column() - 1 : 0));
      }
    }

    try {
      validate_term(term, h.qubits, "term " + std::to_string(h.terms.size() + 1));
    } catch (const InvariantError& e) {
      throw InvariantError("line " + std::to_string(line_no) + ": " + e.what());
    }
    h.terms.push_back(std::move(term));
  }
  if (!have_header) throw ParseError("missing header 'n=<qubits>'", line_no);
  return h;
}

/// Parses the JSON format.
inline Hamiltonian parse_hamiltonian_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    Hamiltonian h;
    const auto n = doc.at("n").get<long long>();
    if (n <= 0 || n > kMaxQubits) throw ParseError("field 'n' must be in [1, " + std::to_string(kMaxQubits) + "]");
    h.qubits = static_cast<unsigned>(n);
    const auto& terms = doc.at("terms");
    if (!terms.is_array()) throw ParseError("field 'terms' must be an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& item = terms[i];
      const std::string where = "terms[" + std::to_string(i) + "]";
      LocalTerm term;
      if (item.contains("pauli")) {
        const auto letters = item.at("pauli").get<std::string>();
        try {
          term.body = PauliTerm{item.value("coeff", 1.0), PauliString(letters)};
        } catch (const ParseError& e) {
          throw ParseError(where + ".pauli: " + e.what());
        }
      } else if (item.contains("qubits") && item.contains("block")) {
        BlockTerm block;
        block.support = item.at("qubits").get<std::vector<unsigned>>();
        block.hermitian = item.value("hermitian", true);
        if (block.support.empty() || block.support.size() > 30) throw ParseError(where + ": bad support size");
        const std::size_t dim = std::size_t{1} << block.support.size();
        const auto& entries = item.at("block");
        if (!entries.is_array() || entries.size() != dim * dim)
          throw ParseError(where + ".block: expected " + std::to_string(dim * dim) + " row-major entries");
        block.block.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t e = 0; e < entries.size(); ++e) {
          const auto& v = entries[e];
          Complex z;
          if (v.is_number()) z = v.get<double>();
          else if (v.is_array() && v.size() == 2) z = Complex(v[0].get<double>(), v[1].get<double>());
          else throw ParseError(where + ".block[" + std::to_string(e) + "]: expected number or [re, im]");
          block.block(static_cast<Eigen::Index>(e / dim), static_cast<Eigen::Index>(e % dim)) = z;
        }
        term.body = std::move(block);
      } else {
        throw ParseError(where + ": expected 'pauli' or 'qubits' + 'block'");
      }
      if (item.contains("kappa_i")) term.kappa_override = item.at("kappa_i").get<double>();
      validate_term(term, h.qubits, where);
      h.terms.push_back(std::move(term));
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed Hamiltonian JSON: ") + e.what());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Loads a Hamiltonian; files ending in ".json" use the JSON format.
inline Hamiltonian load_hamiltonian(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".json") return parse_hamiltonian_json(text);
  return parse_hamiltonian_text(text);
}

/// Text-format rendering with round-trip precision.
inline std::string to_text(const Hamiltonian& h) {
  std::string out = "n=" + std::to_string(h.qubits) + "\n";
  char buf[64];
  auto real = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& t : h.terms) {
    if (const auto* p = std::get_if<PauliTerm>(&t.body)) {
      out += real(p->coefficient) + " " + p->string.str();
    } else {
      const auto& b = std::get<BlockTerm>(t.body);
      out += "BLOCK q=";
      for (std::size_t a = 0; a < b.support.size(); ++a) out += (a ? "," : "") + std::to_string(b.support[a]);
      for (Eigen::Index r = 0; r < b.block.rows(); ++r)
        for (Eigen::Index c = 0; c < b.block.cols(); ++c)
          out += " " + real(b.block(r, c).real()) + "," + real(b.block(r, c).imag());
    }
    if (t.kappa_override) out += " KAPPA_I=" + real(*t.kappa_override);
    out += "\n";
  }
  return out;
}

}  // namespace dequant
