#pragma once
// Serialization: trees and bi-measure trees as JSON (ids dense, parent before
// child), excursions as CSV, plus small helpers that stamp every output file
// with the resolved run configuration. All numbers are printed with %.17g so
// a (config, seed) pair reproduces files byte for byte.

#include <json.hpp>
#include <string>

#include "excursion.hpp"
#include "measure.hpp"

namespace bimt {

using Json = nlohmann::ordered_json;

std::string format_double(double x);

Json tree_to_json(const FiniteRTree& t);
std::shared_ptr<const FiniteRTree> tree_from_json(const Json& j);

Json point_to_json(const TreePoint& p);
TreePoint point_from_json(const Json& j, const FiniteRTree& t);

// {length_coeff: [...], atoms: [{point, mass}]}; whole-edge measures only
Json measure_to_json(const TreeMeasure& m);
TreeMeasure measure_from_json(const Json& j, std::shared_ptr<const FiniteRTree> tree);

Json bimeasure_to_json(const BiMeasureTree& x);
BiMeasureTree bimeasure_from_json(const Json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// CSV with "# config=<json>" as the first line
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const Json& config, const std::string& header);
  void row(const std::vector<std::string>& cells);
  void close();
  ~CsvWriter();

 private:
  std::string path_;
  std::string buffer_;
  bool closed_ = false;
};

std::string excursion_csv(const Excursion& e, const Json& config);

}  // namespace bimt
