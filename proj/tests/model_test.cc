#include "kfuse/model.h"

#include <gtest/gtest.h>

#include <cmath>

#include "kfuse/io.h"
#include "stub_manifest.h"
#include "test_util.h"

namespace kfuse {
namespace {

using testing::stub_manifest;
using testing::TempDir;

TEST(ClassTableTest, PcbTaxonomyHasElevenClassesInOrder) {
  const ClassTable t = ClassTable::pcb_components();
  ASSERT_EQ(t.size(), 11u);
  const std::vector<std::string> expected = {"C",   "D", "IC",   "L",  "R", "XTAL",
                                             "LED", "Q", "AL_C", "RY", "FI"};
  EXPECT_EQ(t.names(), expected);
  EXPECT_EQ(t.find("AL_C"), 8);
  EXPECT_FALSE(t.find("X").has_value());
  EXPECT_EQ(t.name(5), "XTAL");
}

TEST(ClassTableTest, RejectsDuplicateAndEmptyNames) {
  EXPECT_THROW(ClassTable({"A", "B", "A"}), Error);
  EXPECT_THROW(ClassTable({"A", ""}), Error);
  EXPECT_NO_THROW(ClassTable({"anything", "goes"}));
}

TEST(ViewpointTest, GridGeometry) {
  EXPECT_EQ(ViewpointId::center().kind(), ViewKind::kCenter);
  for (int v : {2, 4, 6, 8}) EXPECT_EQ(ViewpointId(v).kind(), ViewKind::kEdge) << v;
  for (int v : {1, 3, 7, 9}) EXPECT_EQ(ViewpointId(v).kind(), ViewKind::kCorner) << v;
  EXPECT_TRUE(ViewpointId(4).moves_x());
  EXPECT_FALSE(ViewpointId(4).moves_y());
  EXPECT_FALSE(ViewpointId(2).moves_x());
  EXPECT_TRUE(ViewpointId(8).moves_y());
  EXPECT_THROW(ViewpointId(0), Error);
  EXPECT_THROW(ViewpointId(10), Error);
}

TEST(DetectionTest, InvariantChecks) {
  EXPECT_NO_THROW(check_detection(testing::det(0, 1, 1, 2, 2, 0.5)));
  EXPECT_THROW(check_detection(testing::det(0, 1, 1, 0, 2)), Error);
  EXPECT_THROW(check_detection(testing::det(0, 1, 1, 2, 2, 1.5)), Error);
  EXPECT_THROW(check_detection(testing::det(-1, 1, 1, 2, 2)), Error);
  EXPECT_THROW(check_detection(testing::det(11, 1, 1, 2, 2), 11), Error);
  EXPECT_THROW(check_detection(testing::det(0, std::nan(""), 1, 2, 2)), Error);
}

TEST(DisparityFieldTest, ChannelLayoutFollowsGrid) {
  const ImageSize size{8, 4};
  for (ViewpointId v : surrounding_views()) {
    EXPECT_NO_THROW(DisparityField::zeros(v, size).validate()) << v.index();
  }
  DisparityField edge = DisparityField::zeros(ViewpointId(2), size);
  edge.dx = Raster(8, 4);
  EXPECT_THROW(edge.validate(), Error);

  DisparityField corner = DisparityField::zeros(ViewpointId(1), size);
  corner.dy.reset();
  EXPECT_THROW(corner.validate(), Error);

  DisparityField wrong = DisparityField::zeros(ViewpointId(6), size);
  wrong.dx = Raster(7, 4);
  try {
    wrong.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(ValidateManifestTest, PaperDatasetCounts) {
  const ManifestStats s = validate_manifest(stub_manifest(262), {.check_files = false});
  EXPECT_TRUE(s.ok());
  EXPECT_EQ(s.frames, 262u);
  EXPECT_EQ(s.view_images, 2358u);
  EXPECT_EQ(s.disparity_channels, 3144u);
  EXPECT_EQ(s.disparity_maps, 8u * 262u);
}

TEST(ValidateManifestTest, EmptyAndSmallManifests) {
  const ManifestStats empty = validate_manifest(stub_manifest(0), {.check_files = false});
  EXPECT_EQ(empty.frames, 0u);
  EXPECT_EQ(empty.view_images, 0u);
  EXPECT_EQ(empty.disparity_channels, 0u);

  const ManifestStats seven = validate_manifest(stub_manifest(7), {.check_files = false});
  EXPECT_EQ(seven.frames, 7u);
  EXPECT_EQ(seven.view_images, 9u * 7u);
  EXPECT_EQ(seven.disparity_channels, 12u * 7u);
}

TEST(ValidateManifestTest, ArithmeticHoldsForEveryFrameCount) {
  for (std::size_t n = 0; n < 40; ++n) {
    const ManifestStats s = validate_manifest(stub_manifest(n), {.check_files = false});
    EXPECT_EQ(s.view_images, 9 * n);
    EXPECT_EQ(s.disparity_channels, 12 * n);
  }
}

TEST(ValidateManifestTest, ReportsDuplicateShotIds) {
  DatasetManifest m = stub_manifest(3);
  m.frames[2].shot_id = m.frames[0].shot_id;
  const ManifestStats s = validate_manifest(m, {.check_files = false});
  ASSERT_EQ(s.issues.size(), 1u);
  EXPECT_EQ(s.issues[0].code, ErrorCode::kDuplicateShotId);
  EXPECT_EQ(s.issues[0].shot_id, "shot_0000");
}

TEST(ValidateManifestTest, ReportsUndeclaredChannel) {
  DatasetManifest m = stub_manifest(2);
  m.frames[1].disparity[3].y.clear();
  const ManifestStats s = validate_manifest(m, {.check_files = false});
  ASSERT_EQ(s.issues.size(), 1u);
  EXPECT_EQ(s.issues[0].code, ErrorCode::kMissingFile);
  EXPECT_EQ(s.issues[0].shot_id, "shot_0001");
  EXPECT_EQ(s.disparity_channels, 23u);
}

TEST(ValidateManifestTest, MissingFilesAndDimensionMismatch) {
  TempDir dir;
  DatasetManifest m = stub_manifest(1, {6, 4});
  m.base_dir = dir.path();
  const FrameEntry& f = m.frames[0];
  write_text_file(dir / f.labels.at(5), "");
  for (const auto& [v, p] : f.disparity) {
    if (!p.x.empty()) write_pfm(Raster(6, 4), dir / p.x);
    if (!p.y.empty()) write_pfm(Raster(6, 4), dir / p.y);
  }
  EXPECT_TRUE(validate_manifest(m).ok());

  write_pfm(Raster(5, 4), dir / f.disparity.at(9).x);
  std::filesystem::remove(dir / f.labels.at(5));
  const ManifestStats s = validate_manifest(m);
  ASSERT_EQ(s.issues.size(), 2u);
  EXPECT_EQ(s.issues[0].code, ErrorCode::kDimensionMismatch);
  EXPECT_EQ(s.issues[1].code, ErrorCode::kMissingFile);
  EXPECT_EQ(s.issues[1].shot_id, "shot_0000");
}

}  // namespace
}  // namespace kfuse
