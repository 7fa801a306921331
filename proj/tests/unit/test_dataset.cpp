#include "aigiqa/dataset.hpp"
#include "aigiqa/image.hpp"
#include "aigiqa/synthetic.hpp"
#include "error_code.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

using namespace aigiqa;
namespace fs = std::filesystem;

namespace {

DatasetManifest parse(const std::string & csv, const std::string & profile = "agiqa-3k", const fs::path & base = ".") {
    std::istringstream in(csv);
    return parse_manifest(in, base, DatasetProfile::by_name(profile));
}

DatasetManifest numbered(int n) {
    std::string csv = "image,mos\n";
    for (int i = 0; i < n; ++i) csv += "img" + std::to_string(i) + ".png," + std::to_string(i % 6 * 0.8) + "\n";
    return parse(csv);
}

void write_gray_pgm(const fs::path & path, int w, int h) {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n" << w << " " << h << "\n255\n";
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) out.put(static_cast<char>((x * 7 + y * 3) % 256));
    }
}

} // namespace

TEST(Manifest, ParsesWellFormedCsv) {
    const auto m = parse("image,mos\na.png,1.5\nb.png,0\nc.png,5\n");
    ASSERT_EQ(m.records.size(), 3u);
    EXPECT_EQ(m.records[0].image, "a.png");
    EXPECT_EQ(m.records[2].mos, 5.0);
    EXPECT_EQ(m.label_hi, 5.0);
    EXPECT_FALSE(m.split.has_value());
}

TEST(Manifest, RejectsBadInput) {
    EXPECT_EQ(code_of([] { parse("image,mos\na.png,7.2\n"); }), ErrorCode::OutOfRangeLabel);
    EXPECT_EQ(code_of([] { parse("image,mos\na.png,-0.1\n"); }), ErrorCode::OutOfRangeLabel);
    EXPECT_EQ(code_of([] { parse("image,score\na.png,1\n"); }), ErrorCode::MissingColumn);
    EXPECT_EQ(code_of([] { parse("image,mos\na.png,1\na.png,2\n"); }), ErrorCode::DuplicateRecord);
    EXPECT_EQ(code_of([] { parse("image,mos\na.png,abc\n"); }), ErrorCode::MalformedManifest);
    EXPECT_EQ(code_of([] { parse("image,mos\na.png,50\n", "aigciqa2023"); }), ErrorCode::MissingColumn);
}

TEST(Manifest, TwoDimensionProfile) {
    const auto m = parse("image,mos,authenticity\na.png,64.3,10\nb.png,20,90\n", "aigciqa2023");
    ASSERT_EQ(m.records.size(), 2u);
    EXPECT_EQ(m.records[0].target("quality"), 64.3);
    EXPECT_EQ(m.records[1].target("authenticity"), 90.0);
    EXPECT_EQ(m.target_dims, (std::vector<std::string>{"quality", "authenticity"}));
}

TEST(Manifest, EagerValidationChecksFiles) {
    oracle::TempDir dir("manifest");
    write_gray_pgm(dir / "ok.pgm", 8, 8);
    {
        std::ofstream(dir / "m.csv") << "image,mos\nok.pgm,1\n";
        std::ofstream(dir / "bad.csv") << "image,mos\nmissing.png,1\n";
    }
    const auto profile = DatasetProfile::by_name("agiqa-3k");
    const auto m = load_manifest(dir / "m.csv", profile, {true});
    EXPECT_EQ(m.records[0].image_path, dir / "ok.pgm");
    EXPECT_NO_THROW(load_manifest(dir / "bad.csv", profile));
    EXPECT_EQ(code_of([&] { load_manifest(dir / "bad.csv", profile, {true}); }), ErrorCode::UnreadableImage);
}

TEST(Manifest, WriteAndReloadWithSplit) {
    oracle::TempDir dir("rt");
    const auto split = make_split(numbered(10), 0.8, 7);
    write_manifest(split, dir / "m.csv");
    const auto back = load_manifest(dir / "m.csv", DatasetProfile::by_name("agiqa-3k"));
    ASSERT_EQ(back.records.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(back.records[i].image, split.records[i].image);
        EXPECT_EQ(back.records[i].mos, split.records[i].mos);
        EXPECT_EQ(back.records[i].split, split.records[i].split);
    }
}

TEST(Split, EightTwoAndDeterministic) {
    const auto m = numbered(10);
    const auto a = make_split(m, 0.8, 7);
    const auto b = make_split(m, 0.8, 7);
    EXPECT_EQ(a.count(Split::Train), 8u);
    EXPECT_EQ(a.count(Split::Test), 2u);
    ASSERT_TRUE(a.split.has_value());
    EXPECT_EQ(*a.split, *b.split);
    EXPECT_EQ(a.split->seed, 7u);
}

TEST(Split, RoundingClampsBothSides) {
    const auto m = numbered(10);
    const auto hi = make_split(m, 0.999, 1);
    EXPECT_EQ(hi.count(Split::Train), 9u);
    EXPECT_EQ(hi.count(Split::Test), 1u);
    const auto lo = make_split(m, 0.01, 1);
    EXPECT_EQ(lo.count(Split::Train), 1u);
    EXPECT_EQ(lo.count(Split::Test), 9u);
    EXPECT_EQ(code_of([&] { make_split(numbered(1), 0.5, 1); }), ErrorCode::EmptySplit);
    EXPECT_EQ(code_of([&] { make_split(m, 1.0, 1); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([&] { make_split(m, 0.0, 1); }), ErrorCode::InvalidConfig);
}

TEST(Split, DifferentSeedsDiffer) {
    const auto m = numbered(100);
    EXPECT_NE(make_split(m, 0.8, 1).split->test_ids, make_split(m, 0.8, 2).split->test_ids);
}

TEST(Split, SidecarRoundTripAndApply) {
    oracle::TempDir dir("split");
    const auto m = numbered(12);
    const auto a = make_split(m, 0.75, 3);
    write_split_sidecar(*a.split, dir / "split.json");
    const SplitInfo info = read_split_sidecar(dir / "split.json");
    EXPECT_EQ(info, *a.split);
    const auto b = apply_split(m, info);
    for (std::size_t i = 0; i < m.records.size(); ++i) EXPECT_EQ(b.records[i].split, a.records[i].split);

    SplitInfo partial = info;
    partial.test_ids.pop_back();
    EXPECT_THROW(apply_split(m, partial), Error);
}

TEST(Labels, NormalizeAndInvert) {
    const auto m = parse("image,mos\na,5\nb,2.5\nc,0\n");
    const auto n = normalize_labels(m);
    EXPECT_TRUE(n.normalized);
    EXPECT_EQ(n.records[0].mos, 1.0);
    EXPECT_EQ(n.records[1].mos, 0.5);
    EXPECT_EQ(n.records[2].mos, 0.0);

    const auto big = parse("image,mos,authenticity\na,64.3,12.5\nb,99.9,0\n", "aigciqa2023");
    const auto nb = normalize_labels(big);
    EXPECT_NEAR(nb.records[0].mos, 0.643, 1e-12);
    EXPECT_NEAR(nb.records[0].target("authenticity"), 0.125, 1e-12);
    const auto back = denormalize_labels(nb);
    for (std::size_t i = 0; i < big.records.size(); ++i) {
        EXPECT_NEAR(back.records[i].mos, big.records[i].mos, 1e-12);
        EXPECT_NEAR(back.records[i].target("authenticity"), big.records[i].target("authenticity"), 1e-12);
    }

    DatasetManifest flat = m;
    flat.label_hi = flat.label_lo;
    EXPECT_EQ(code_of([&] { normalize_labels(flat); }), ErrorCode::ZeroRange);
}

TEST(Preprocess, GeometryAndNormalization) {
    RgbImage wide(768, 512);
    for (auto & v : wide.pixels) v = 128;
    const PixelTensor t = preprocess(wide);
    EXPECT_EQ(t.channels, 3);
    EXPECT_EQ(t.height, 224);
    EXPECT_EQ(t.width, 224);
    const PreprocessSpec spec;
    for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(t.at(c, 100, 100), (128.0f / 255.0f - spec.mean[c]) / spec.stddev[c], 1e-5);
    }

    RgbImage exact(224, 224);
    for (std::size_t i = 0; i < exact.pixels.size(); ++i) exact.pixels[i] = static_cast<std::uint8_t>(i * 31 % 256);
    const PixelTensor e = preprocess(exact);
    EXPECT_EQ(e.width, 224);
    // no resampling at the native size: values map one to one
    const auto * px = exact.at(17, 40);
    EXPECT_NEAR(e.at(1, 40, 17), (px[1] / 255.0f - spec.mean[1]) / spec.stddev[1], 1e-6);
    EXPECT_EQ(preprocess(exact), e);
}

TEST(Preprocess, GrayscaleIsReplicated) {
    oracle::TempDir dir("gray");
    write_gray_pgm(dir / "g.pgm", 300, 260);
    const RgbImage img = decode_image(dir / "g.pgm");
    EXPECT_EQ(img.width, 300);
    EXPECT_EQ(img.height, 260);
    const auto * p = img.at(11, 5);
    EXPECT_EQ(p[0], p[1]);
    EXPECT_EQ(p[1], p[2]);
    EXPECT_EQ(p[0], (11 * 7 + 5 * 3) % 256);
    const PixelTensor t = preprocess_image(dir / "g.pgm");
    EXPECT_EQ(t.height, 224);
    EXPECT_EQ(t, preprocess_image(dir / "g.pgm"));
}

TEST(Preprocess, DecodeFailure) {
    oracle::TempDir dir("bad");
    std::ofstream(dir / "x.png") << "not an image";
    EXPECT_EQ(code_of([&] { decode_image(dir / "x.png"); }), ErrorCode::DecodeFailure);
    EXPECT_EQ(code_of([&] { decode_image(dir / "missing.png"); }), ErrorCode::DecodeFailure);
}

TEST(Synthetic, DatasetRoundTrip) {
    oracle::TempDir dir("synth");
    const auto m = write_synthetic_dataset(dir.path(), 6, 3, DatasetProfile::by_name("aigciqa2023"), 64);
    ASSERT_EQ(m.records.size(), 6u);
    for (const auto & r : m.records) {
        EXPECT_TRUE(fs::exists(r.image_path));
        EXPECT_GE(r.mos, 0.0);
        EXPECT_LE(r.mos, 100.0);
        EXPECT_EQ(r.aux_scores.count("authenticity"), 1u);
    }
    const auto again = load_manifest(dir / "manifest.csv", DatasetProfile::by_name("aigciqa2023"), {true});
    EXPECT_EQ(again.records.size(), 6u);
}
