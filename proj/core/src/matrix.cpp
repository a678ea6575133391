#include "nnmc/matrix.hpp"

#include "nnmc/svd.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace nnmc {

bool is_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) +
                                ": non-finite matrix entries");
  }
}

MatrixNorms norms(const Matrix& m) {
  require_finite(m, "norms");
  const Vector sigma = singular_values(m);
  MatrixNorms out;
  out.nuclear = sigma.sum();
  out.frobenius = m.norm();
  out.spectral = sigma.size() > 0 ? sigma(0) : 0.0;
  out.max_abs = m.cwiseAbs().maxCoeff();
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view token, const std::string& context) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t' ||
                           last[-1] == '\r')) --last;
  double value = 0.0;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::invalid_argument(context + ": bad number '" +
                                std::string(token) + "'");
  }
  return value;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      row.push_back(parse_double(
          std::string_view(line).substr(start, end - start), path));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument(path + ": ragged rows in matrix file");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": empty matrix file");
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  require_finite(m, path.c_str());
  return m;
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  require_finite(m, "write_matrix_csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file: " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace nnmc
