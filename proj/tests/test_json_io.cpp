#include <gtest/gtest.h>

#include "horolab/error.hpp"
#include "horolab/json_io.hpp"

using namespace horolab;

TEST(JsonIo, CurveRoundTrip) {
  const Json j = parse_json(R"({"dims":[2,3],"rates":[1,0.5],"factors":[[[0,1]],[[0.1,1,2],[0,0,0,1]]]})");
  const CurveSpec c = curve_from_json(j);
  EXPECT_EQ(c.shape().dims(), (std::vector<int>{2, 3}));
  EXPECT_EQ(c.degree(), 3);
  EXPECT_DOUBLE_EQ(c(0.5)[1][0], 0.1 + 0.5 + 0.5);
  EXPECT_EQ(curve_to_json(curve_from_json(curve_to_json(c))), curve_to_json(c));
}

TEST(JsonIo, CurveErrors) {
  EXPECT_THROW(parse_json("{"), ParseError);
  EXPECT_THROW(curve_from_json(parse_json(R"({"dims":[2],"rates":[1]})")), ParseError);
  EXPECT_THROW(curve_from_json(parse_json(R"({"dims":[2],"rates":[1],"factors":[[["x"]]]})")), ParseError);
  EXPECT_THROW(curve_from_json(parse_json(R"({"dims":[2],"rates":[1],"factors":[[[0,1],[0,2]]]})")), ArgumentError);
  EXPECT_THROW(load_json_file("/nonexistent/curve.json"), IoError);
}

TEST(JsonIo, MobiusSpec) {
  const ProductShape shape({2, 2, 3}, {1, 1, 0.5});
  const auto spec = mobius_spec_from_json(
      parse_json(R"({"partition":[[1,2],[3]],"m":[2,1],"mobius":["identity",[[1,0,0],[0,1,0],[0,0,1]],"identity"]})"),
      shape);
  EXPECT_EQ(spec.partition()[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(spec.block_of(2), 1);
  EXPECT_EQ(spec.mobius()[2].n(), 3);

  const auto whole = mobius_spec_from_json(parse_json(R"({"partition":[[1,2],[3]],"m":[2,1],"mobius":"identity"})"), shape);
  EXPECT_EQ(whole.m(), (std::vector<int>{2, 1}));

  EXPECT_THROW(mobius_spec_from_json(parse_json(R"({"partition":[[0,1],[2]],"m":[2,1]})"), shape), ParseError);
  EXPECT_THROW(mobius_spec_from_json(parse_json(R"({"partition":[[1,2,3]],"m":[2]})"), shape), ArgumentError);
  EXPECT_THROW(mobius_spec_from_json(parse_json(R"({"partition":[[1,2],[3]],"m":[2,1],"mobius":["identity"]})"), shape),
               ParseError);
  EXPECT_THROW(
      mobius_spec_from_json(parse_json(R"({"partition":[[1,2],[3]],"m":[2,1],"mobius":["id","identity","identity"]})"),
                            shape),
      ParseError);
  // Not in SO(Q_2).
  EXPECT_THROW(
      mobius_spec_from_json(
          parse_json(R"({"partition":[[1,2],[3]],"m":[2,1],"mobius":[[[2,0,0],[0,1,0],[0,0,1]],"identity","identity"]})"),
          shape),
      ConsistencyError);
}

TEST(JsonIo, UnstableSpec) {
  const ProductShape shape({2, 3}, {1, 1});
  const auto spec = unstable_spec_from_json(parse_json(R"({"powers":[1,2],"null_vectors":[[2,2,1],[1,1,1,1]]})"), shape);
  EXPECT_EQ(spec.powers(), (std::vector<int>{1, 2}));
  EXPECT_THROW(unstable_spec_from_json(parse_json(R"({"powers":[1,2],"null_vectors":[[1,1,1],[1,1,1,1]]})"), shape),
               ConsistencyError);
  EXPECT_THROW(unstable_spec_from_json(parse_json(R"({"dims":[2,2],"rates":[1,1],"powers":[1,1],"null_vectors":[[1,0,0],[1,0,0]]})"),
                                       shape),
               ArgumentError);
}

TEST(JsonIo, TensorRoundTrip) {
  auto rep = make_rep(ProductShape({2}, {1.0}), {2});
  TensorVector v(rep);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1 * static_cast<double>(i) - 0.3;
  const TensorVector w = tensor_from_json(tensor_to_json(v));
  EXPECT_EQ(w.coeffs(), v.coeffs());
  EXPECT_EQ(w.rep()->powers(), v.rep()->powers());
}

TEST(JsonIo, Matrix) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6.25;
  EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
  EXPECT_THROW(matrix_from_json(parse_json("[[1,2],[3]]")), ParseError);
  EXPECT_THROW(matrix_from_json(parse_json("[]")), ParseError);
}
