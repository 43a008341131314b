#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "annplan/predicate_parser.hpp"
#include "test_helpers.hpp"

using namespace annplan;
using namespace annplan::testing;

TEST_CASE("label equality and conjunctions parse") {
  AttributeSchema schema = shop_schema();
  Predicate p = parse_predicate(schema, "color = \"green\" AND type = \"shoes\"");
  REQUIRE(p.label_terms.size() == 2);
  CHECK(p.label_terms[0] == LabelTerm{"color", "green"});
  CHECK(p.label_terms[1] == LabelTerm{"type", "shoes"});
  CHECK_FALSE(p.has_ranges());
}

TEST_CASE("parenthesized comparisons ORed with a bound normalize to a union") {
  AttributeSchema schema = shop_schema();  // age in [0, 100)
  Predicate p = parse_predicate(schema, "(age > 20 AND age < 25) OR age < 10");
  REQUIRE(p.ranges.size() == 2);
  CHECK(p.range_attribute == "age");
  CHECK(p.ranges[0] == Interval{0.0, 10.0, false, true});
  CHECK(p.ranges[1] == Interval{20.0, 25.0, true, true});
}

TEST_CASE("IN clauses and bracket styles") {
  AttributeSchema schema = shop_schema();
  Predicate p = parse_predicate(schema, "age IN (20,25) OR age IN [0,10)");
  REQUIRE(p.ranges.size() == 2);
  CHECK(p.ranges[0] == Interval{0.0, 10.0, false, true});
  CHECK(p.ranges[1] == Interval{20.0, 25.0, true, true});

  Predicate closed = parse_predicate(schema, "age IN [1.5,2.5]");
  CHECK(closed.ranges[0] == Interval{1.5, 2.5, false, false});
}

TEST_CASE("comparisons desugar against schema bounds") {
  AttributeSchema schema = shop_schema();
  CHECK(parse_predicate(schema, "age >= 30").ranges[0] == Interval{30.0, 100.0, false, false});
  CHECK(parse_predicate(schema, "age <= 10").ranges[0] == Interval{0.0, 10.0, false, false});
  CHECK(parse_predicate(schema, "age > 30").ranges[0] == Interval{30.0, 100.0, true, false});
  CHECK(parse_predicate(schema, "age < 10").ranges[0] == Interval{0.0, 10.0, false, true});
}

TEST_CASE("mixed predicates combine labels and one range attribute") {
  AttributeSchema schema = shop_schema();
  Predicate p = parse_predicate(schema, "color = \"green\" AND (age < 10 OR age > 90)");
  CHECK(p.label_terms.size() == 1);
  REQUIRE(p.ranges.size() == 2);
  CHECK(p.ranges[0] == Interval{0.0, 10.0, false, true});
  CHECK(p.ranges[1] == Interval{90.0, 100.0, true, false});
}

TEST_CASE("overlapping unions merge during parsing") {
  AttributeSchema schema = shop_schema();
  Predicate p = parse_predicate(schema, "age IN [0,15) OR age IN [10,20)");
  REQUIRE(p.ranges.size() == 1);
  CHECK(p.ranges[0] == Interval{0.0, 20.0, false, true});
}

TEST_CASE("conjunction of ranges intersects") {
  AttributeSchema schema = shop_schema();
  Predicate p = parse_predicate(schema, "age > 20 AND age < 25");
  REQUIRE(p.ranges.size() == 1);
  CHECK(p.ranges[0] == Interval{20.0, 25.0, true, true});

  Predicate nested = parse_predicate(schema, "(age < 10 OR age > 90) AND age >= 5");
  REQUIRE(nested.ranges.size() == 2);
  CHECK(nested.ranges[0] == Interval{5.0, 10.0, false, true});
  CHECK(nested.ranges[1] == Interval{90.0, 100.0, true, false});
}

TEST_CASE("empty input is the match-all predicate") {
  AttributeSchema schema = shop_schema();
  Predicate p = parse_predicate(schema, "   ");
  CHECK(p.empty());
}

TEST_CASE("rejections") {
  AttributeSchema schema = shop_schema();
  // OR between label terms is not supported.
  CHECK_THROWS_AS(parse_predicate(schema, "color = \"red\" OR color = \"green\""), SchemaError);
  // OR across attributes.
  CHECK_THROWS_AS(parse_predicate(schema, "age < 10 OR color = \"red\""), SchemaError);
  // Ranges over two different numeric attributes need two attributes; reuse
  // age via a second schema.
  AttributeSchema two_numeric({{"age", AttributeKind::Numeric, 0, 100},
                               {"price", AttributeKind::Numeric, 0, 10}});
  CHECK_THROWS_AS(parse_predicate(two_numeric, "age < 10 AND price < 5"), SchemaError);
  CHECK_THROWS_AS(parse_predicate(two_numeric, "age < 10 OR price < 5"), SchemaError);
  // Range syntax on a categorical attribute.
  CHECK_THROWS_AS(parse_predicate(schema, "color IN (0,1)"), SchemaError);
  CHECK_THROWS_AS(parse_predicate(schema, "color > 3"), SchemaError);
  // '=' on a numeric attribute.
  CHECK_THROWS_AS(parse_predicate(schema, "age = \"5\""), SchemaError);
  // Unknown attribute.
  CHECK_THROWS_AS(parse_predicate(schema, "material = \"wool\""), SchemaError);
  // Trailing garbage and malformed strings.
  CHECK_THROWS_AS(parse_predicate(schema, "color = \"green\" extra"), SchemaError);
  CHECK_THROWS_AS(parse_predicate(schema, "color = \"green"), SchemaError);
  CHECK_THROWS_AS(parse_predicate(schema, "age IN (10,5)"), SchemaError);
  // Contradictory conjunction.
  CHECK_THROWS_AS(parse_predicate(schema, "age < 10 AND age > 20"), SchemaError);
}

TEST_CASE("keywords are case-insensitive") {
  AttributeSchema schema = shop_schema();
  Predicate p = parse_predicate(schema, "color = \"red\" and age in [5,10)");
  CHECK(p.label_terms.size() == 1);
  CHECK(p.ranges.size() == 1);
}

TEST_CASE("text round-trip reproduces the predicate") {
  AttributeSchema schema = shop_schema();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    Predicate p;
    if (rng() % 2) p.add_label("color", "color" + std::to_string(rng() % 4));
    if (rng() % 2) p.add_label("type", "type" + std::to_string(rng() % 3));
    if (rng() % 2 || p.empty()) {
      std::vector<Interval> ivs;
      std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (a == b) b += 0.5;
        ivs.push_back({a, b, rng() % 2 == 0, rng() % 2 == 0});
      }
      p.set_ranges("age", ivs);
    }
    Predicate back = parse_predicate(schema, predicate_to_text(p));
    CHECK(back == p);
  }
}
