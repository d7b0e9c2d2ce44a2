#include <gtest/gtest.h>
#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "ivos/evaluation.hpp"

namespace ivos {
namespace {
namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("ivos_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

void write_rgb_png(const fs::path& p, int w, int h) {
  FILE* f = std::fopen(p.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, f);
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(w) * 3, 40);
  for (int y = 0; y < h; ++y) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(f);
}

SyntheticSpec two_objects(const std::string& name, int frames = 6) {
  SyntheticSpec spec;
  spec.name = name;
  spec.width = 32;
  spec.height = 24;
  spec.frames = frames;
  spec.seed = 5;
  spec.noise = 4;
  SyntheticShape a;
  a.id = 1;
  a.x = 2;
  a.y = 3;
  a.width = 8;
  a.height = 6;
  a.vx = 1;
  a.color = {200, 40, 40};
  SyntheticShape b;
  b.id = 2;
  b.kind = SyntheticShape::Kind::ellipse;
  b.x = 24;
  b.y = 16;
  b.width = 4;
  b.height = 3;
  b.color = {40, 200, 40};
  spec.objects = {a, b};
  return spec;
}

TEST(LabelPng, RoundTrip) {
  TempDir dir;
  LabelMask m(13, 7);
  std::mt19937 rng(2);
  for (auto& v : m.values()) v = static_cast<std::uint8_t>(rng() % 4 == 0 ? rng() % 256 : 0);
  write_label_png(dir.path() / "m.png", m);
  EXPECT_EQ(read_label_png(dir.path() / "m.png"), m);
}

TEST(LabelPng, RejectsOtherColourTypes) {
  TempDir dir;
  write_rgb_png(dir.path() / "rgb.png", 4, 3);
  EXPECT_THROW(read_label_png(dir.path() / "rgb.png"), LoadError);
  write_text(dir.path() / "junk.png", "not a png");
  EXPECT_THROW(read_label_png(dir.path() / "junk.png"), LoadError);
  EXPECT_THROW(read_label_png(dir.path() / "missing.png"), LoadError);
}

TEST(Jpeg, RoundTripKeepsSize) {
  TempDir dir;
  Image img{9, 5, std::vector<std::uint8_t>(9 * 5 * 3, 128)};
  write_jpeg(dir.path() / "a.jpg", img);
  const Image back = read_jpeg(dir.path() / "a.jpg");
  EXPECT_EQ(back.width, 9);
  EXPECT_EQ(back.height, 5);
  for (auto v : back.rgb) EXPECT_NEAR(v, 128, 2);
  write_text(dir.path() / "b.jpg", "garbage");
  EXPECT_THROW(read_jpeg(dir.path() / "b.jpg"), LoadError);
}

TEST(Dataset, WriteThenLoad) {
  TempDir dir;
  const SequenceDataset seq = generate_synthetic(two_objects("toy"));
  write_dataset(seq, dir.path());
  const auto loaded = load_dataset(dir.path(), {});
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(loaded[0].name, "toy");
  EXPECT_EQ(loaded[0].annotations, seq.annotations);
  EXPECT_EQ(loaded[0].object_ids, (std::vector<int>{1, 2}));
  EXPECT_FALSE(loaded[0].scribbles.has_value());
  ASSERT_NE(loaded[0].frame(3), nullptr);
  EXPECT_EQ(loaded[0].frame(3)->width, 32);
}

TEST(Dataset, CountMismatchAndMissingDirectory) {
  TempDir dir;
  write_dataset(generate_synthetic(two_objects("toy")), dir.path());
  fs::remove(dir.path() / "Annotations" / "480p" / "toy" / "00005.png");
  EXPECT_THROW(load_dataset(dir.path(), {"toy"}), LoadError);
  EXPECT_THROW(load_dataset(dir.path(), {"absent"}), LoadError);
  EXPECT_THROW(load_dataset(dir.path() / "nowhere", {}), LoadError);
}

TEST(Scribbles, CoordinateMapping) {
  TempDir dir;
  write_text(dir.path() / "s.json", R"({"sequence": "toy", "scribbles": [[],
    [{"object_id": 1, "path": [[0.0, 0.0], [1.0, 1.0], [0.5, 0.5]]}]]})");
  const ScribbleFile file = load_scribbles(dir.path() / "s.json", 100, 100, {1});
  EXPECT_EQ(file.sequence, "toy");
  ASSERT_EQ(file.frames.size(), 2u);
  EXPECT_TRUE(file.frames[0].empty());
  ASSERT_EQ(file.frames[1].size(), 1u);
  EXPECT_EQ(file.frames[1][0].frame_index, 1);
  EXPECT_EQ(file.frames[1][0].path, (std::vector<PixelCoord>{{0, 0}, {99, 99}, {50, 50}}));
}

TEST(Scribbles, Rejections) {
  TempDir dir;
  write_text(dir.path() / "id.json", R"({"scribbles": [[{"object_id": 3, "path": [[0.1, 0.1]]}]]})");
  EXPECT_THROW(load_scribbles(dir.path() / "id.json", 10, 10, {1}), LoadError);
  write_text(dir.path() / "range.json", R"({"scribbles": [[{"object_id": 1, "path": [[1.2, 0.1]]}]]})");
  EXPECT_THROW(load_scribbles(dir.path() / "range.json", 10, 10, {1}), LoadError);
  write_text(dir.path() / "bad.json", "{");
  EXPECT_THROW(load_scribbles(dir.path() / "bad.json", 10, 10, {1}), LoadError);
}

TEST(Scribbles, PickedUpFromTheDatasetTree) {
  TempDir dir;
  write_dataset(generate_synthetic(two_objects("toy")), dir.path());
  write_text(dir.path() / "Scribbles" / "toy" / "002.json",
             R"({"scribbles": [[{"object_id": 2, "path": [[0.0, 0.0]]}]]})");
  write_text(dir.path() / "Scribbles" / "toy" / "001.json",
             R"({"scribbles": [[], [{"object_id": 1, "path": [[0.0, 0.0]]}]]})");
  const auto loaded = load_dataset(dir.path(), {"toy"});
  ASSERT_TRUE(loaded[0].scribbles.has_value());
  ASSERT_EQ(loaded[0].scribbles->size(), 2u);
  EXPECT_EQ((*loaded[0].scribbles)[1][0].object_id, 1);
}

TEST(Synthetic, DeterministicAndTranslating) {
  const SyntheticSpec spec = two_objects("toy");
  const SequenceDataset a = generate_synthetic(spec);
  const SequenceDataset b = generate_synthetic(spec);
  EXPECT_EQ(a.annotations, b.annotations);
  for (int f = 0; f < spec.frames; ++f) EXPECT_EQ(a.frame(f)->rgb, b.frame(f)->rgb);
  for (int f = 0; f < spec.frames; ++f) {
    const LabelMask& m = a.annotations[f];
    EXPECT_EQ(m(2 + f, 3), 1);
    EXPECT_EQ(m(9 + f, 8), 1);
    EXPECT_NE(m(10 + f, 3), 1);
    if (f > 0) { EXPECT_NE(m(1 + f, 3), 1); }
  }
  SyntheticSpec other = spec;
  other.seed = 6;
  EXPECT_NE(generate_synthetic(other).frame(0)->rgb, a.frame(0)->rgb);
}

TEST(Synthetic, RejectsOverlapsAndDuplicates) {
  SyntheticSpec spec = two_objects("toy", 30);
  spec.objects[0].y = 12;
  EXPECT_THROW(generate_synthetic(spec), std::invalid_argument);  // the rectangle reaches the ellipse
  spec = two_objects("toy");
  spec.objects[1].id = 1;
  EXPECT_THROW(generate_synthetic(spec), std::invalid_argument);
  EXPECT_THROW(parse_synthetic_spec("{\"width\": 4}"), std::invalid_argument);
}

TEST(Synthetic, ParsesJson) {
  const SyntheticSpec spec = parse_synthetic_spec(R"({"name": "p", "width": 20, "height": 10,
    "frames": 3, "objects": [{"id": 4, "shape": "rectangle", "x": 1, "y": 2, "width": 3,
    "height": 2, "velocity": [1, 0], "jumps": [{"frame": 2, "dx": 5, "dy": 1}]}]})");
  const SequenceDataset seq = generate_synthetic(spec);
  EXPECT_EQ(seq.object_ids, (std::vector<int>{4}));
  EXPECT_EQ(seq.annotations[0](1, 2), 4);
  EXPECT_EQ(seq.annotations[1](2, 2), 4);
  EXPECT_EQ(seq.annotations[2](8, 3), 4);
  EXPECT_EQ(count(binary_of(seq.annotations[2], 4)), 6u);
}

std::vector<SequenceDataset> small_corpus() {
  std::vector<SequenceDataset> out;
  for (const char* name : {"delta", "alpha", "charlie", "bravo"}) {
    SyntheticSpec spec = two_objects(name);
    spec.objects[0].y = name[0] % 5;
    out.push_back(generate_synthetic(spec));
  }
  return out;
}

TEST(Evaluation, WorkerCountDoesNotChangeTheReport) {
  const auto corpus = small_corpus();
  RunConfig config;
  config.max_rounds = 4;
  const auto one = run_evaluation(corpus, config, 1);
  const auto four = run_evaluation(corpus, config, 4);
  EXPECT_EQ(report_to_json(one), report_to_json(four));
  ASSERT_EQ(one.sequences.size(), 4u);
  EXPECT_EQ(one.sequences[0].name, "alpha");
  EXPECT_EQ(one.sequences[3].name, "delta");
  EXPECT_FALSE(one.partial);
}

TEST(Evaluation, ReportRoundTripsAndAgreesWithItsCurve) {
  const auto corpus = small_corpus();
  RunConfig config;
  config.max_rounds = 3;
  const auto report = run_evaluation(corpus, config, 2);
  EXPECT_EQ(report.schema_version, "1.0.0");
  EXPECT_EQ(report_from_json(report_to_json(report)), report);
  EXPECT_EQ(report.r_auc, r_auc(report.global_curve, config.max_rounds));

  double sum = 0.0;
  std::size_t pairs = 0;
  for (const auto& s : report.sequences) {
    sum += s.rounds.empty() ? s.initial_jf_sum : s.rounds.back().jf_sum;
    pairs += s.pairs;
  }
  EXPECT_NEAR(report.global_curve.samples().back().global_jf, sum / pairs, 1e-12);

  std::size_t rows = 0;
  for (const auto& s : report.sequences) rows += s.rounds.size();
  const std::string csv = report_to_csv(report);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), rows + 2);
  EXPECT_EQ(csv.rfind("sequence,round,global_jf\n", 0), 0u);
  EXPECT_NE(csv.find("summary:r_auc,3,"), std::string::npos);
}

TEST(Evaluation, FailingSequenceMakesThePartialReport) {
  auto corpus = small_corpus();
  corpus[1].annotations[2] = LabelMask(5, 5);
  RunConfig config;
  config.max_rounds = 2;
  const auto report = run_evaluation(corpus, config, 2);
  EXPECT_TRUE(report.partial);
  int failed = 0;
  for (const auto& s : report.sequences) failed += s.error.has_value();
  EXPECT_EQ(failed, 1);
}

TEST(Evaluation, ConfigValidation) {
  RunConfig config;
  config.max_rounds = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.memory_stride = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.backends.propagator = "nope";
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(Score, PerfectPredictionsScoreOne) {
  TempDir dir;
  const SequenceDataset seq = generate_synthetic(two_objects("toy"));
  write_dataset(seq, dir.path() / "gt");
  write_dataset(seq, dir.path() / "pred");
  const auto scores = score_sequences(dir.path() / "pred", dir.path() / "gt", {"toy"});
  ASSERT_EQ(scores.size(), 1u);
  EXPECT_EQ(scores[0].mean_jf, 1.0);
  EXPECT_EQ(scores[0].pairs, 12u);
}

}  // namespace
}  // namespace ivos
