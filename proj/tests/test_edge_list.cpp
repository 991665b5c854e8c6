#include <doctest.h>

#include <cmath>
#include <sstream>

#include "epictrl/edge_list.hpp"
#include "epictrl/error.hpp"

using namespace epictrl;

TEST_CASE("small file ingests") {
  const ContactNetwork g = parse_network_string("@source s\ns a 1.0 0.5\na b 1.0 0.5\n");
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.label(g.source()) == "s");
  CHECK(g.label(2) == "b");
}

TEST_CASE("comments, blank lines and scientific notation") {
  const ContactNetwork g = parse_network_string(
      "# header\n\n@source x\nx y 2.5e0 5e-1   # trailing\n  y z 1 1\n");
  CHECK(g.num_edges() == 2);
  CHECK(g.edge(0).cost == 2.5);
  CHECK(g.edge(0).prob == 0.5);
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse_network_string(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("@source a\na b 1.0 1.3\n") == 2);
  CHECK(line_of("@source a\na b -1 0.5\n") == 2);
  CHECK(line_of("@source a\na b 1 0.5\nb a 1 0.5\n") == 3);
  CHECK(line_of("@source a\na b 1\n") == 2);
  CHECK(line_of("@source a\na b one 0.5\n") == 2);
  CHECK_THROWS_AS(parse_network_string("a b 1 0.5\n"), Error);
  CHECK_THROWS_AS(parse_network_string("@source q\na b 1 0.5\n"), Error);
}

TEST_CASE("seeds are merged on load") {
  const ContactNetwork g = parse_network_string("@seeds a b\na b 1 0.5\nb c 1 0.5\nc d 1 0.5\n");
  CHECK(g.num_vertices() == 5);
  CHECK(g.num_edges() == 5);
  CHECK(g.edge(g.num_edges() - 1).prob == 1.0);
  CHECK(std::isinf(g.edge(g.num_edges() - 1).cost));
  CHECK_THROWS_AS(parse_network_string("@seeds z\na b 1 0.5\n"), Error);
}

TEST_CASE("write then parse round-trips") {
  const ContactNetwork g =
      parse_network_string("@seeds a\na b 0.125 0.3333333333333333\nb c 3 1\nc c 1 1\n");
  std::ostringstream out;
  write_network(out, g);
  const ContactNetwork back = parse_network_string(out.str());
  REQUIRE(back.num_edges() == g.num_edges());
  CHECK(back.num_vertices() == g.num_vertices());
  CHECK(back.label(back.source()) == g.label(g.source()));
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    CHECK(back.label(back.edge(e).u) == g.label(g.edge(e).u));
    CHECK(back.label(back.edge(e).v) == g.label(g.edge(e).v));
    CHECK(back.edge(e).prob == g.edge(e).prob);
    CHECK(back.edge(e).cost == g.edge(e).cost);
  }
}

TEST_CASE("missing file") { CHECK_THROWS_AS(load_network("/nonexistent/graph.tsv"), Error); }

TEST_CASE("isolated source cannot be written") {
  const ContactNetwork g(3, {{1, 2, 1.0, 0.5}}, 0);
  std::ostringstream out;
  CHECK_THROWS_AS(write_network(out, g), ValidationError);
}
