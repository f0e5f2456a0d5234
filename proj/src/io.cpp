#include "entwit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace entwit {

namespace {

using nlohmann::json;

constexpr Real kFileHermiticity = 1e-9;

/// 17 significant digits: the shortest fixed precision that reproduces any
/// finite double exactly when parsed back.  Negative zero must carry a
/// fractional part — a bare "-0" token reads back as the integer zero and
/// loses the sign bit.
std::string format_number(Real x) {
  if (x == 0.0 && std::signbit(x)) return "-0.0";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Real number_at(const json& node, const std::string& where) {
  if (!node.is_number())
    throw InvariantError("matrix file: " + where +
                         " must be a JSON number (no string forms)");
  const Real x = node.get<Real>();
  if (!std::isfinite(x))
    throw InvariantError("matrix file: " + where + " must be finite");
  return x;
}

Complex complex_at(const json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 2)
    throw InvariantError("matrix file: " + where +
                         " must be a two-element [re, im] array");
  return Complex(number_at(node[0], where + "[0]"),
                 number_at(node[1], where + "[1]"));
}

json parse_document(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvariantError(what + ": document is not valid JSON (" +
                         std::string(e.what()) + ")");
  }
}

std::string slurp(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InvariantError(what + ": cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& text,
           const std::string& what) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InvariantError(what + ": cannot write '" + path + "'");
  out << text;
  if (!out)
    throw InvariantError(what + ": write to '" + path + "' failed");
}

void emit_complex(std::ostream& out, const Complex& z) {
  out << '[' << format_number(z.real()) << ", " << format_number(z.imag())
      << ']';
}

void emit_matrix_file(std::ostream& out, const MatrixFile& file,
                      const std::string& indent) {
  out << "{\n";
  if (!file.name.empty())
    out << indent << "  \"name\": " << json(file.name).dump() << ",\n";
  out << indent << "  \"dims\": [";
  for (std::size_t k = 0; k < file.dims.size(); ++k)
    out << (k ? ", " : "") << file.dims[k];
  out << "],\n" << indent << "  \"matrix\": [\n";
  const Index d = file.matrix.rows();
  for (Index i = 0; i < d; ++i) {
    out << indent << "    [";
    for (Index j = 0; j < d; ++j) {
      if (j) out << ", ";
      emit_complex(out, file.matrix(i, j));
    }
    out << (i + 1 < d ? "],\n" : "]\n");
  }
  out << indent << "  ]\n" << indent << '}';
}

}  // namespace

MatrixFile parse_matrix_file(const std::string& text) {
  const json doc = parse_document(text, "matrix file");
  if (!doc.is_object())
    throw InvariantError("matrix file: top level must be a JSON object");
  if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty())
    throw InvariantError(
        "matrix file: 'dims' must be a non-empty array of counts");

  MatrixFile out;
  Index total = 1;
  for (const json& d : doc["dims"]) {
    if (!d.is_number_integer() || d.get<long long>() < 1)
      throw InvariantError("matrix file: every entry of 'dims' must be a "
                           "positive integer");
    out.dims.push_back(static_cast<Index>(d.get<long long>()));
    total *= out.dims.back();
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string())
      throw InvariantError("matrix file: 'name' must be a string");
    out.name = doc["name"].get<std::string>();
  }

  if (!doc.contains("matrix") || !doc["matrix"].is_array())
    throw InvariantError("matrix file: 'matrix' must be an array of rows");
  const json& rows = doc["matrix"];
  if (static_cast<Index>(rows.size()) != total)
    throw DimensionError(
        "matrix file: matrix must have (prod dims) = " +
        std::to_string(total) + " rows, got " + std::to_string(rows.size()));
  out.matrix.resize(total, total);
  for (Index i = 0; i < total; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != total)
      throw DimensionError("matrix file: row " + std::to_string(i) +
                           " must have (prod dims) = " + std::to_string(total) +
                           " entries");
    for (Index j = 0; j < total; ++j)
      out.matrix(i, j) = complex_at(
          row[static_cast<std::size_t>(j)],
          "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return out;
}

std::string write_matrix_file(const MatrixFile& file) {
  Index total = 1;
  for (Index d : file.dims) total *= d;
  if (file.dims.empty() || file.matrix.rows() != total ||
      file.matrix.cols() != total)
    throw DimensionError(
        "matrix file: matrix shape must be (prod dims) x (prod dims)");
  if (!all_finite(file.matrix))
    throw InvariantError("matrix file: entries must be finite");
  std::ostringstream out;
  emit_matrix_file(out, file, "");
  out << '\n';
  return out.str();
}

MatrixFile read_matrix_file(const std::string& path) {
  return parse_matrix_file(slurp(path, "matrix file"));
}

void save_matrix_file(const std::string& path, const MatrixFile& file) {
  spill(path, write_matrix_file(file), "matrix file");
}

HermitianOperator to_hermitian(const MatrixFile& file) {
  if (file.matrix.rows() != file.matrix.cols())
    throw DimensionError("matrix file: matrix must be square");
  if (!all_finite(file.matrix))
    throw InvariantError("matrix file: entries must be finite");
  if (hermiticity_defect(file.matrix) > kFileHermiticity)
    throw InvariantError(
        "matrix file: matrix deviates from H = H^dagger by more than 1e-9");
  return HermitianOperator(symmetrize(file.matrix));
}

DensityOperator to_density(const MatrixFile& file) {
  return DensityOperator(file.dims, to_hermitian(file));
}

MatrixFile from_hermitian(const HermitianOperator& op,
                          const std::vector<Index>& dims,
                          const std::string& name) {
  Index total = 1;
  for (Index d : dims) total *= d;
  if (dims.empty() || total != op.dim())
    throw DimensionError(
        "matrix file: product of dims must equal the operator dimension");
  return MatrixFile{dims, op.matrix(), name};
}

std::string write_report_file(const ReportFile& report) {
  const bool fires = report.value < -report.detect_eps;
  if (fires != (report.verdict == VerdictKind::Entangled))
    throw InvariantError(
        "report file: verdict kind must be Entangled exactly when "
        "value < -detect_eps");
  if (report.witness) {
    Index total = 1;
    for (Index d : report.witness->dims) total *= d;
    if (report.witness->dims.empty() ||
        report.witness->matrix.rows() != total ||
        report.witness->matrix.cols() != total)
      throw DimensionError(
          "report file: witness matrix shape must be (prod dims) x "
          "(prod dims)");
  }

  std::ostringstream out;
  out << "{\n";
  out << "  \"method\": " << json(report.method).dump() << ",\n";
  out << "  \"verdict\": "
      << (report.verdict == VerdictKind::Entangled ? "\"ENTANGLED\""
                                                   : "\"INCONCLUSIVE\"")
      << ",\n";
  out << "  \"value\": " << format_number(report.value) << ",\n";
  out << "  \"detect_eps\": " << format_number(report.detect_eps) << ",\n";
  out << "  \"certificates\": {\n";
  out << "    \"duality_gap\": " << format_number(report.duality_gap) << ",\n";
  out << "    \"primal_residual\": " << format_number(report.primal_residual)
      << ",\n";
  out << "    \"equality_residual\": "
      << format_number(report.equality_residual) << ",\n";
  out << "    \"iterations\": " << report.iterations << ",\n";
  out << "    \"status\": " << json(report.status).dump() << "\n  },\n";
  if (report.witness) {
    out << "  \"witness\": ";
    emit_matrix_file(out, *report.witness, "  ");
    out << ",\n";
  }
  if (report.seesaw_value)
    out << "  \"seesaw_value\": " << format_number(*report.seesaw_value)
        << ",\n";
  out << "  \"seed\": " << report.seed << ",\n";
  out << "  \"wall_time_ms\": " << format_number(report.wall_time_ms) << "\n";
  out << "}\n";
  return out.str();
}

ReportFile parse_report_file(const std::string& text) {
  const json doc = parse_document(text, "report file");
  if (!doc.is_object())
    throw InvariantError("report file: top level must be a JSON object");
  ReportFile out;
  try {
    out.method = doc.at("method").get<std::string>();
    const std::string verdict = doc.at("verdict").get<std::string>();
    if (verdict == "ENTANGLED")
      out.verdict = VerdictKind::Entangled;
    else if (verdict == "INCONCLUSIVE")
      out.verdict = VerdictKind::Inconclusive;
    else
      throw InvariantError(
          "report file: verdict must be ENTANGLED or INCONCLUSIVE");
    out.value = doc.at("value").get<Real>();
    out.detect_eps = doc.at("detect_eps").get<Real>();
    const json& cert = doc.at("certificates");
    out.duality_gap = cert.at("duality_gap").get<Real>();
    out.primal_residual = cert.at("primal_residual").get<Real>();
    out.equality_residual = cert.at("equality_residual").get<Real>();
    out.iterations = cert.at("iterations").get<int>();
    out.status = cert.at("status").get<std::string>();
    if (doc.contains("witness"))
      out.witness = parse_matrix_file(doc.at("witness").dump());
    if (doc.contains("seesaw_value"))
      out.seesaw_value = doc.at("seesaw_value").get<Real>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.wall_time_ms = doc.at("wall_time_ms").get<Real>();
  } catch (const json::exception& e) {
    throw InvariantError("report file: missing or mistyped field (" +
                         std::string(e.what()) + ")");
  }
  return out;
}

void save_report_file(const std::string& path, const ReportFile& report) {
  spill(path, write_report_file(report), "report file");
}

ReportFile read_report_file(const std::string& path) {
  return parse_report_file(slurp(path, "report file"));
}

}  // namespace entwit
