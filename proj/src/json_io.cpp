#include "horolab/json_io.hpp"

#include <fstream>
#include <sstream>

#include "horolab/error.hpp"

namespace horolab {

namespace {

// Runs fn, translating schema errors from the JSON library into ParseError.
template <class Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

ProductShape shape_from_json(const Json& j) {
  return ProductShape(j.at("dims").get<std::vector<int>>(), j.at("rates").get<std::vector<double>>());
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  try {
    return Json::parse(os.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw ParseError("matrix: no rows");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw ParseError("matrix: ragged rows");
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return m;
  });
}

CurveSpec curve_from_json(const Json& j) {
  return guarded("curve", [&] {
    ProductShape shape = shape_from_json(j);
    const auto raw = j.at("factors").get<std::vector<std::vector<std::vector<double>>>>();
    std::vector<std::vector<Polynomial>> factors;
    for (const auto& f : raw) {
      std::vector<Polynomial> coords;
      for (const auto& c : f) coords.emplace_back(c);
      factors.push_back(std::move(coords));
    }
    const int max_degree = j.value("max_degree", CurveSpec::kDefaultMaxDegree);
    return CurveSpec(std::move(shape), std::move(factors), max_degree);
  });
}

Json curve_to_json(const CurveSpec& curve) {
  Json j;
  j["dims"] = curve.shape().dims();
  j["rates"] = curve.shape().rates();
  Json factors = Json::array();
  for (const auto& f : curve.factors()) {
    Json coords = Json::array();
    for (const auto& p : f) coords.push_back(p.coeffs());
    factors.push_back(coords);
  }
  j["factors"] = factors;
  return j;
}

MobiusEmbeddingSpec mobius_spec_from_json(const Json& j, const ProductShape& shape) {
  return guarded("mobius spec", [&] {
    std::vector<std::vector<int>> partition = j.at("partition").get<std::vector<std::vector<int>>>();
    for (auto& block : partition) {
      for (int& f : block) {
        if (f < 1) throw ParseError("mobius spec: partition entries are 1-based");
        --f;
      }
    }
    const auto m = j.at("m").get<std::vector<int>>();
    std::vector<GroupElement> mobius;
    const Json& mj = j.contains("mobius") ? j.at("mobius") : Json("identity");
    if (mj.is_string()) {
      if (mj.get<std::string>() != "identity") throw ParseError("mobius spec: unknown keyword " + mj.dump());
      for (int i = 0; i < shape.k(); ++i) mobius.push_back(GroupElement::identity(shape.space(i)));
    } else {
      if (!mj.is_array() || static_cast<int>(mj.size()) != shape.k()) {
        throw ParseError("mobius spec: need one matrix or \"identity\" per factor");
      }
      for (int i = 0; i < shape.k(); ++i) {
        if (mj[i].is_string()) {
          if (mj[i].get<std::string>() != "identity") throw ParseError("mobius spec: unknown keyword " + mj[i].dump());
          mobius.push_back(GroupElement::identity(shape.space(i)));
        } else {
          mobius.emplace_back(shape.space(i), matrix_from_json(mj[i]));
        }
      }
    }
    return MobiusEmbeddingSpec(shape, std::move(partition), m, std::move(mobius));
  });
}

UnstableDirectionSpec unstable_spec_from_json(const Json& j, const ProductShape& shape) {
  return guarded("unstable spec", [&] {
    const ProductShape own = j.contains("dims") ? shape_from_json(j) : shape;
    if (!(own.dims() == shape.dims())) throw ArgumentError("unstable spec: dims differ from the curve");
    std::vector<Vector> vs;
    for (const auto& raw : j.at("null_vectors").get<std::vector<std::vector<double>>>()) {
      vs.push_back(Eigen::Map<const Vector>(raw.data(), static_cast<Eigen::Index>(raw.size())));
    }
    return UnstableDirectionSpec(own, j.at("powers").get<std::vector<int>>(), std::move(vs));
  });
}

Json tensor_to_json(const TensorVector& v) {
  Json j;
  j["shape"] = {{"dims", v.rep()->shape().dims()}, {"rates", v.rep()->shape().rates()}};
  j["powers"] = v.rep()->powers();
  j["coeffs"] = v.coeffs();
  return j;
}

TensorVector tensor_from_json(const Json& j) {
  return guarded("tensor", [&] {
    auto rep = make_rep(shape_from_json(j.at("shape")), j.at("powers").get<std::vector<int>>());
    return TensorVector(rep, j.at("coeffs").get<std::vector<double>>());
  });
}

}  // namespace horolab
