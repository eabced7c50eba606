#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "hrpart/coefficients.hpp"
#include "hrpart/estimators.hpp"
#include "hrpart/exact.hpp"

using namespace hrpart;

namespace {

// Reference values computed independently with 60-digit mpmath.
constexpr int kOracleDigits = 40;

const coefficient_registry& published() {
  static const coefficient_registry r = coefficient_registry::published_defaults();
  return r;
}

const partition_table& table() {
  static const partition_table t = build_table(10000);
  return t;
}

real rel_error(const real& estimate, std::int64_t n) {
  real exact(table()[static_cast<std::size_t>(n)]);
  return (estimate - exact) / exact;
}

void expect_oracle(const real& value, const char* expected) {
  EXPECT_TRUE(agrees_to_digits(value, parse_real(expected), kOracleDigits))
      << format_real(value, 45) << " vs " << expected;
}

}  // namespace

TEST(Rh, OracleValues) {
  expect_oracle(rh(1), "1.87667042260536916234640528917711537809563499");
  expect_oracle(rh(100), "199280893.34974011251565830286309574685827945");
  expect_oracle(rh(10000), "3.6328058007588395493685612737048337177501238e+106");
}

TEST(Rh, RelativeErrorAtOneHundred) {
  auto e = rel_error(rh(100), 100);
  EXPECT_GT(e, real("0.03"));
  EXPECT_LE(e, real("0.09"));
  EXPECT_TRUE(agrees_to_digits(e, real("0.045713563073635769795"), 18));
}

TEST(Rh, RejectsNonpositiveN) {
  EXPECT_THROW(rh(0), domain_error);
  EXPECT_THROW(rh(-4), domain_error);
}

TEST(Rh, ExceedsExactValuesUpTo10000) {
  for (std::int64_t n = 1; n <= 10000; ++n) {
    ASSERT_GT(rh(n), real(table()[static_cast<std::size_t>(n)])) << "n=" << n;
  }
}

TEST(Rh1, OracleValues) {
  const auto& c = published().get(estimator_kind::rh1);
  expect_oracle(rh1(1, c), "1.12967016220500088206434702259874787548587011");
  expect_oracle(rh1(100, c), "190569177.396585941739868890128328774590739576");
  expect_oracle(rh1(200, c), "3972998980998.55829976063255623102750064098431");
  EXPECT_TRUE(agrees_to_digits(rel_error(rh1(200, c), 200), real("-1.2179575515197965618e-8"), 15));
}

TEST(Rh1, RoundedAtOneHundred) {
  EXPECT_EQ(round_half_up(rh1(100, published().get(estimator_kind::rh1))), bigint("190569177"));
}

TEST(Rh1, RejectsWrongCoefficientKind) {
  EXPECT_THROW(rh1(10, published().get(estimator_kind::rh2)), config_error);
}

TEST(Rh1, GuardsNonpositiveRadicand) {
  coefficient_set bad(estimator_kind::rh1, provenance::refit,
                      {{"a1", "0"}, {"b1", "-5"}, {"c1", "0"}});
  EXPECT_THROW(rh1(3, bad), domain_error);
  EXPECT_NO_THROW(rh1(6, bad));
}

TEST(Rh2, OracleValues) {
  const auto& c = published().get(estimator_kind::rh2);
  expect_oracle(rh2(1, c), "1.1493066975490795983018465164642504447967364");
  expect_oracle(rh2(50, c), "204212.10807505621214943388188216492554603623");
  expect_oracle(rh2(1000, c), "24061467781780854242741928710326.0916519512994");
  EXPECT_LT(abs(rel_error(rh2(50, c), 50)), real("1e-3"));
  EXPECT_LT(abs(rel_error(rh2(1000, c), 1000)), real("1e-6"));
}

TEST(Rh2, GuardsNonpositiveDenominator) {
  coefficient_set bad(estimator_kind::rh2, provenance::refit,
                      {{"a2", "-3"}, {"b2", "0"}, {"c2", "0"}});
  EXPECT_THROW(rh2(4, bad), domain_error);
}

TEST(Rd3, DomainBoundary) {
  const auto& c = published().get(estimator_kind::rd3);
  for (std::int64_t n = -2; n <= 14; ++n) EXPECT_THROW(rd3(n, c), domain_error) << "n=" << n;
  expect_oracle(rd3(15, c), "68.5069724174045061953872466406159664648323516");
  expect_oracle(rd3(1000, c), "24061263504227458660658194040423.9229704920822");
}

TEST(Rd3, ErrorIsOrdersAboveRh2) {
  const auto& c3 = published().get(estimator_kind::rd3);
  const auto& c2 = published().get(estimator_kind::rh2);
  real ratio = abs(rel_error(rd3(1000, c3), 1000)) / abs(rel_error(rh2(1000, c2), 1000));
  EXPECT_GT(ratio, 500);
  EXPECT_LT(ratio, 5000);
}

TEST(F3, OracleValues) {
  const auto& c = published().get(estimator_kind::f3);
  expect_oracle(f3(1, c), "1.87629799146060739182231994714091124092529823");
  expect_oracle(f3(100, c), "195219135.558413213583360900100076687689018111");
  EXPECT_GT(f3_cubic(1, c), 0);
}

TEST(F3, GuardsNonpositiveCubic) {
  coefficient_set bad(estimator_kind::f3, provenance::refit,
                      {{"a1", "0"}, {"b1", "0"}, {"c1", "-1"}, {"d1", "0"}});
  EXPECT_THROW(f3(3, bad), domain_error);
}

TEST(Rh3, OracleValues) {
  const auto& c = published().get(estimator_kind::rh3);
  expect_oracle(rh3(1, c), "13.1633353094803130682677885456009748022443121");
  expect_oracle(rh3(5, c), "7.14996010496179904735051469019992174532628255");
  expect_oracle(rh3(3000, c), "4.96025142781388493493486417914433046039899408e+56");
  EXPECT_EQ(round_half_up(rh3(5, c)), 7);
}

TEST(Rh3, RequiresNAboveShift) {
  coefficient_set shifted(estimator_kind::rh3, provenance::refit,
                          {{"t0", "2.5"}, {"a2", "1"}, {"b2", "0"}, {"c2", "0"}, {"d2", "0"}});
  EXPECT_THROW(rh3(2, shifted), domain_error);
  EXPECT_NO_THROW(rh3(3, shifted));
}

TEST(Rh4, OracleValues) {
  const auto& c = published().get(estimator_kind::rh4);
  expect_oracle(rh4(1, c), "1.00542189718294720863824261489559766959339101");
  expect_oracle(rh4(5000, c), "1.69820168791832932504069180406942247221259454e+74");
  EXPECT_EQ(round_half_up(rh4(1, c)), 1);
  EXPECT_LT(abs(rel_error(real(round_half_up(rh4(5000, c))), 5000)), real("1e-9"));
}

TEST(Rh4, GuardsVanishingDenominator) {
  coefficient_set zero(estimator_kind::rh4, provenance::refit,
                       {{"a3", "0"}, {"b3", "0"}, {"c3", "0"}, {"d3", "0"}});
  EXPECT_THROW(rh4(7, zero), domain_error);
}

TEST(Rh0, OracleValues) {
  const auto& c = published().get(estimator_kind::rh0);
  expect_oracle(rh0(1, c), "0.941912432069137970115252836692786427490227389");
  expect_oracle(rh0(3, c), "2.94099502086072199687638311755792444949225128");
  expect_oracle(rh0(50, c), "204246.756871953950553789965708037036985804902");
  expect_oracle(rh0(100, c), "190557684.970733346835729214651647268101988241");
  EXPECT_TRUE(agrees_to_digits(rel_error(rh0(50, c), 50), real("0.00010163677471992084157"), 18));
  EXPECT_TRUE(agrees_to_digits(rel_error(rh0(100, c), 100), real("-6.0907133278603796622e-5"), 18));
}

TEST(Rh0, DomainAndRange) {
  const auto& c = published().get(estimator_kind::rh0);
  EXPECT_THROW(rh0(2, c), domain_error);
  EXPECT_THROW(rh0(0, c), range_error);
  EXPECT_THROW(rh0(101, c), range_error);
  EXPECT_NO_THROW(rh0(100, c));
}

TEST(Rh0, ParityPicksBranch) {
  const auto& c = published().get(estimator_kind::rh0);
  for (std::int64_t n = 3; n <= 99; n += 2) EXPECT_EQ(rh0_evaluate(n, c).branch, rh0_branch::odd);
  for (std::int64_t n = 4; n <= 100; n += 2) EXPECT_EQ(rh0_evaluate(n, c).branch, rh0_branch::even);
  auto odd = rh0_evaluate(3, c);
  real expected = real("0.4527092482") * sqrt(real("7.35278")) - real("0.05498719946");
  EXPECT_TRUE(agrees_to_digits(odd.shift_term, expected, 45));
}

TEST(RoundHalfUp, Basics) {
  EXPECT_EQ(round_half_up(real("0.5")), 1);
  EXPECT_EQ(round_half_up(real("0.4999")), 0);
  EXPECT_EQ(round_half_up(real(0)), 0);
  EXPECT_EQ(round_half_up(real("2.5")), 3);
  EXPECT_EQ(round_half_up(real("1e40") + real("0.5")), bigint("10000000000000000000000000000000000000001"));
  EXPECT_THROW(round_half_up(real("-0.1")), domain_error);
}

TEST(RoundHalfUp, MatchesFloorForAllEstimators) {
  for (auto kind : all_estimator_kinds) {
    for (std::int64_t n : {15, 37, 64, 99}) {
      real v = estimate(kind, n, published());
      bigint r = round_half_up(v);
      EXPECT_LE(real(r), v + real("0.5"));
      EXPECT_GT(real(r) + 1, v + real("0.5"));
    }
  }
}

TEST(Estimate, DispatchesAndIsDeterministic) {
  EXPECT_EQ(estimate(estimator_kind::rh, 100, published()), rh(100));
  EXPECT_THROW(estimate(estimator_kind::rh0, 2, published()), domain_error);
  EXPECT_EQ(estimate_rounded(estimator_kind::rh1, 100, published()), bigint("190569177"));
  for (auto kind : all_estimator_kinds) {
    EXPECT_EQ(estimate(kind, 77, published()), estimate(kind, 77, published())) << to_string(kind);
  }
}

TEST(Estimate, MissingKindIsConfigError) {
  coefficient_registry empty;
  EXPECT_THROW(estimate(estimator_kind::rh1, 10, empty), config_error);
  EXPECT_NO_THROW(estimate(estimator_kind::rh, 10, empty));
}

TEST(Coefficients, RequiredNamesEnforced) {
  EXPECT_THROW(coefficient_set(estimator_kind::rh1, provenance::refit, {{"a1", "1"}, {"b1", "2"}}),
               config_error);
  EXPECT_THROW(coefficient_set(estimator_kind::rd3, provenance::refit,
                               {{"a3", "1"}, {"b3", "2"}, {"c3", "3"}}),
               config_error);
  EXPECT_THROW(coefficient_set(estimator_kind::rd3, provenance::refit, {{"a3", "1"}, {"b3", "x"}}),
               config_error);
  for (auto kind : all_estimator_kinds) {
    EXPECT_EQ(published_coefficients(kind).values().size(), required_coefficients(kind).size());
  }
}

TEST(Coefficients, DecimalTextIsKeptExactly) {
  const auto& c = published().get(estimator_kind::rd3);
  EXPECT_EQ(c.decimal("b3"), "-75.65700620");
  EXPECT_EQ(c.get("b3"), real("-75.65700620"));
  EXPECT_EQ(published().get(estimator_kind::f3).get("d1"), real("41886536.89"));
}

TEST(Coefficients, KindNames) {
  EXPECT_EQ(parse_estimator_kind("RH1"), estimator_kind::rh1);
  EXPECT_EQ(parse_estimator_kind("rh0"), estimator_kind::rh0);
  EXPECT_THROW(parse_estimator_kind("rh9"), config_error);
}

TEST(Registry, JsonRoundTrip) {
  auto j = to_json(published());
  coefficient_registry back(coefficient_sets_from_json(j));
  for (auto kind : all_estimator_kinds) EXPECT_EQ(back.get(kind), published().get(kind));
}

TEST(Registry, OverridesReplaceOneKind) {
  coefficient_set refit(estimator_kind::rd3, provenance::refit, {{"a3", "5"}, {"b3", "-60"}});
  auto r = published().with({refit});
  EXPECT_EQ(r.get(estimator_kind::rd3).origin(), provenance::refit);
  EXPECT_EQ(r.get(estimator_kind::rh1), published().get(estimator_kind::rh1));
  EXPECT_NO_THROW(rd3(14, r.get(estimator_kind::rd3)));
}

TEST(Registry, DuplicateKindRejected) {
  EXPECT_THROW(coefficient_registry({published_coefficients(estimator_kind::rh1),
                                     published_coefficients(estimator_kind::rh1)}),
               config_error);
}

TEST(Registry, ShippedFileEqualsBuiltInDefaults) {
  const char* dir = std::getenv("HRPART_TEST_DATA");
  ASSERT_NE(dir, nullptr);
  coefficient_registry shipped(load_coefficient_sets(std::filesystem::path(dir) / "published_registry.json"));
  for (auto kind : all_estimator_kinds) {
    EXPECT_EQ(shipped.get(kind), published().get(kind)) << to_string(kind);
    EXPECT_EQ(shipped.get(kind).origin(), provenance::published);
  }
  EXPECT_EQ(shipped.sets().size(), all_estimator_kinds.size());
}
