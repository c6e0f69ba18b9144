#include <gtest/gtest.h>

#include "tfcert/tfcert.hpp"

using namespace tfcert;

TEST(CertificateJson, RoundTrip) {
  const auto c = check_theorem1(make_example1(8, 5), PointSet::from_pairs({{0, 0}, {1, 1}, {2, 0}, {3, 1}}));
  const Json j = to_json(c);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["theorem"], "Thm1");
  EXPECT_EQ(j["verdict"], "Certified");
  const auto back = certificate_from_json(Json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(back.R, c.R);
  EXPECT_EQ(back.margins, c.margins);
}

TEST(CertificateJson, NonFiniteValuesBecomeNull) {
  const auto c = check_theorem2(make_example2(0), PointSet::from_pairs({{0, 0}}));
  const Json j = to_json(c);
  EXPECT_TRUE(j["M"].is_null());
  EXPECT_TRUE(j["bound"].is_null());
  const auto back = certificate_from_json(j);
  EXPECT_TRUE(std::isinf(back.M));
  EXPECT_TRUE(std::isinf(back.bound));
  ASSERT_TRUE(back.translate_x.has_value());
}

TEST(CertificateJson, AllTheoremsRoundTrip) {
  const auto lam = PointSet::from_pairs({{0, 0}, {2, 1}, {4, 2}});
  const GridSpec grid{6.0, 2048, 0.0};
  std::vector<Certificate> cs{
      check_lemma1(make_gaussian(1), lam.times()),
      check_theorem1(make_gaussian(1), lam),
      check_corollary1(make_example1(1, 0), lam),
      check_corollary2(make_gaussian(1), lam, grid),
      check_corollary3(make_gaussian(1), lam, grid),
      check_theorem2(make_singular_cos(1), lam),
      check_theorem3(make_gaussian(1), make_gaussian(1), lam, grid, {6.0, 48, 0.0}),
  };
  for (const auto& c : cs) {
    const Json j = to_json(c);
    EXPECT_EQ(to_json(certificate_from_json(Json::parse(j.dump()))).dump(), j.dump())
        << j["theorem"];
  }
}

TEST(CertificateJson, SchemaViolationsAreRejected) {
  Json j = to_json(check_theorem1(make_gaussian(1), PointSet::from_pairs({{0, 0}})));
  Json extra = j;
  extra["bogus"] = 1;
  EXPECT_THROW(certificate_from_json(extra), InvalidInput);
  Json wrong = j;
  wrong["schema"] = 2;
  EXPECT_THROW(certificate_from_json(wrong), InvalidInput);
  Json verdict = j;
  verdict["verdict"] = "Maybe";
  EXPECT_THROW(certificate_from_json(verdict), InvalidInput);
  Json missing = j;
  missing.erase("R");
  EXPECT_THROW(certificate_from_json(missing), InvalidInput);
}

TEST(ReportJson, Fields) {
  const auto rep =
      gram_matrix(make_gaussian(1), PointSet::from_pairs({{0, 0}, {1, 0}}), GridSpec::defaults(1));
  const Json j = Json::parse(to_json(rep).dump());
  EXPECT_EQ(j["mode"], "Gram");
  EXPECT_EQ(j["matrix_dim"], Json::array({2, 2}));
  EXPECT_EQ(j["verdict"], "Independent");
  EXPECT_NEAR(j["sigma_min"].get<double>(), 1 - std::exp(-kPi / 2), 1e-10);
  const auto csv = matrix_csv(rep.matrix);
  EXPECT_EQ(csv.substr(0, 15), "row,col,re,im\n0");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);

  const auto er = dependence_residual_er({{0.0, 0.0}}, 1e-9);
  const Json k = Json::parse(to_json(er).dump());
  EXPECT_EQ(k["identity_name"], er.identity_name);
  EXPECT_EQ(k["phase_optimized"], false);
  EXPECT_EQ(k["best_phase"], Json::array({1.0, 0.0}));
}

TEST(ConfigJson, FamilySpec) {
  const auto s = family_spec_from_json(Json::parse(R"({"family":"Example1","params":{"C":8,"omega":5}})"));
  EXPECT_EQ(s.family, Family::Example1);
  EXPECT_EQ(s.param("C", 0), 8.0);
  EXPECT_EQ(to_json(s)["family"], "Example1");
  EXPECT_THROW(family_spec_from_json(Json::parse(R"({"family":"Example1","params":{"C":-1}})")),
               InvalidInput);
  EXPECT_THROW(family_spec_from_json(Json::parse(R"({"family":"Nope"})")), InvalidInput);
  EXPECT_THROW(family_spec_from_json(Json::parse(R"({"family":"Gaussian","colour":1})")),
               InvalidInput);
  EXPECT_THROW(family_spec_from_json(Json::parse(R"({"family":"Gaussian","params":{"C":"x"}})")),
               InvalidInput);
}

TEST(ConfigJson, GridAndPoints) {
  const auto g = grid_from_json(Json::parse(R"({"half_width":4})"), GridSpec::defaults(1));
  EXPECT_EQ(g.half_width, 4.0);
  EXPECT_EQ(g.samples_per_axis, GridSpec::defaults(1).samples_per_axis);
  EXPECT_THROW(grid_from_json(Json::parse(R"({"samples_per_axis":1})"), g), InvalidInput);
  EXPECT_THROW(grid_from_json(Json::parse(R"({"cells":3})"), g), InvalidInput);
  const auto p = point_set_from_json(Json::parse("[[0,0],[1,0.5]]"), 1);
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].omega[0], 0.5);
  const auto p2 = point_set_from_json(Json::parse("[[0,0,1,1]]"), 2);
  EXPECT_EQ(p2.dim(), 2u);
  EXPECT_THROW(point_set_from_json(Json::parse("[[0,0,1]]"), 1), InvalidInput);
  EXPECT_THROW(point_set_from_json(Json::parse("[[0,0],[0,0]]"), 1), InvalidInput);
  EXPECT_THROW(point_set_from_json(Json::parse("{}"), 1), InvalidInput);
}

TEST(SearchJson, TraceCsv) {
  const auto res = search(make_gaussian(1), 2.0, 2, 1, 10, 4);
  const auto csv = trace_csv(res);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "evaluation,width,ratio,incumbent_ratio,c0,c1");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), res.evaluations + 1);
  const Json j = Json::parse(to_json(res).dump());
  EXPECT_EQ(j["trace"].size(), res.evaluations);
  EXPECT_EQ(j["achieved"], res.achieved);
}
