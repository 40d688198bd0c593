#include <gtest/gtest.h>

#include "wgff/io.hpp"

using namespace wgff;

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(GraphJson, RoundTrip) {
  for (const PlanarGraph& g : {gen_square_lattice(0.25, {{-1, -1}, {1, 1}}), gen_random_environment(0.5, {{0, 0}, {2, 1}}, 0.25, 3),
                               gen_hex_lattice(0.5, {{-1, -1}, {1, 1}})}) {
    const auto j = graph_to_json(g);
    EXPECT_EQ(j["version"], "winding-gff/graph/1");
    const auto h = graph_from_json(nlohmann::json::parse(j.dump()));
    ASSERT_EQ(h.pos, g.pos);
    ASSERT_EQ(h.color, g.color);
    ASSERT_EQ(h.num_edges(), g.num_edges());
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      EXPECT_EQ(h.edges[k].src, g.edges[k].src);
      EXPECT_EQ(h.edges[k].dst, g.edges[k].dst);
      EXPECT_EQ(h.edges[k].weight, g.edges[k].weight);
      EXPECT_EQ(h.edges[k].polyline, g.edges[k].polyline);
    }
  }
}

TEST(GraphJson, RejectsWrongVersion) {
  auto j = graph_to_json(gen_square_lattice(1, {{0, 0}, {1, 1}}));
  j["version"] = "other";
  EXPECT_THROW(graph_from_json(j), InvalidArgument);
}

TEST(TreeCsv, ParentsParseBack) {
  const auto w = clip_and_wire(gen_square_lattice(0.25, {{-1, -1}, {1, 1}}), Domain::disc(0, 1));
  Rng rng(2);
  const auto t = wilson_ust(w, rng);
  std::istringstream in(tree_csv(t, w));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "vertex_id,parent_vertex_id");
  int count = 0;
  while (std::getline(in, line)) {
    const auto c = line.find(',');
    const int v = std::stoi(line.substr(0, c)), p = std::stoi(line.substr(c + 1));
    EXPECT_EQ(v, count);
    EXPECT_EQ(p, t.parent(w, v));
    ++count;
  }
  EXPECT_EQ(count, w.num_interior());
  const auto meta = tree_metadata(2, "raster", w);
  EXPECT_EQ(meta["domain"]["kind"], "disc");
  EXPECT_EQ(meta["root"], w.root());
}

TEST(FieldCsv, FullPrecision) {
  const std::vector<Point> pos{{0.1, 0.2}, {1.0 / 3, -2}};
  const std::vector<double> vals{std::acos(-1.0), -1e-300};
  std::istringstream in(field_csv(pos, vals));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "vertex_id,x,y,value");
  for (int i = 0; i < 2; ++i) {
    std::getline(in, line);
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> f;
    while (std::getline(ss, tok, ',')) f.push_back(std::stod(tok));
    EXPECT_EQ(f[0], i);
    EXPECT_EQ(f[1], pos[i].real());
    EXPECT_EQ(f[2], pos[i].imag());
    EXPECT_EQ(f[3], vals[i]);
  }
}

TEST(Raster, NearestValueAndAffineMap) {
  const std::vector<Point> pos{{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  const std::vector<double> vals{0, 1, 2, 3};
  const auto r = rasterize(pos, vals, {{0, 0}, {1, 1}}, 4, 4);
  const std::string header = "P5\n4 4\n255\n";
  ASSERT_EQ(r.pgm.substr(0, header.size()), header);
  const auto px = [&](int row, int col) { return static_cast<unsigned char>(r.pgm[header.size() + row * 4 + col]); };
  EXPECT_EQ(px(3, 0), 0);    // bottom left
  EXPECT_EQ(px(3, 3), 85);   // bottom right, value 1
  EXPECT_EQ(px(0, 0), 170);  // top left, value 2
  EXPECT_EQ(px(0, 3), 255);
  const double g = r.meta["gray_per_value"].get<double>() * 2 + r.meta["gray_offset"].get<double>();
  EXPECT_NEAR(g, 170, 1e-12);
}

TEST(Raster, MaskZeroesOutside) {
  const std::vector<Point> pos{{0, 0}};
  const Domain d = Domain::disc(0, 0.5);
  const auto r = rasterize(pos, {1.0}, {{-1, -1}, {1, 1}}, 8, 8, &d);
  const std::size_t off = std::string("P5\n8 8\n255\n").size();
  EXPECT_EQ(r.pgm[off], 0);
  EXPECT_EQ(r.meta["masked_gray"], 0);
}

TEST(Sidecar, CarriesHashSeedAndVersion) {
  const auto s = sidecar("a", 42);
  EXPECT_EQ(s["config_hash"], "af63dc4c8601ec8c");
  EXPECT_EQ(s["seed"], 42);
  EXPECT_EQ(s["version"], artifact_version);
  const auto dir = std::filesystem::temp_directory_path() / "wgff_io_test";
  write_with_sidecar(dir / "x.csv", "a,b\n", s);
  std::ifstream f(dir / "x.csv.json");
  EXPECT_EQ(nlohmann::json::parse(f), s);
  std::filesystem::remove_all(dir);
}
