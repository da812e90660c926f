#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hpsep/raster.hpp"

namespace hpsep {

/// Layout family of a generated page: running text, a label/value form with
/// underlined fields, or a rule-free table of aligned short entries.
enum class PageStructure { Free, Form, Table };

const char* to_string(PageStructure structure);
PageStructure page_structure_from_string(const std::string& text);

/// Full recipe for one synthetic page. Everything the generator does is a
/// pure function of this struct, so equal specs give bit-identical pages.
struct PageSpec {
  std::uint64_t seed = 1;
  int dpi = 300;
  int width = 1240;
  int height = 900;
  PageStructure structure = PageStructure::Free;
  int printed_lines = 12;  ///< printed text lines (or table rows)
  int annotations = 3;     ///< handwritten scribble clusters
  /// Salt specks per 1000 page pixels. 0 disables ALL noise (specks and
  /// blobs), so a zero-noise spec yields purely printed/handwritten ink.
  double noise_density = 0.25;
  int blob_count = 6;  ///< pepper blobs (3-8 px, too big for kfill)
  double skew_deg = 0.0;
  bool border_artifacts = false;
  int intra_word_gap_min = 2;
  int intra_word_gap_max = 3;
  int inter_word_gap_min = 8;
  int inter_word_gap_max = 14;
};

/// A rendered page plus its per-pixel labels (0 background, 1 handwritten,
/// 2 printed, 3 noise). Labels partition the ink exactly: truth(x,y) > 0
/// if and only if image(x,y) is ink.
struct GeneratedPage {
  BinaryImage image;
  LabelRaster truth;
};

/// Renders one page. Printed words use the embedded bitmap font on straight
/// baselines; handwriting is simulated by variable-thickness wavy strokes;
/// noise is salt specks plus larger blobs. Skew rotation and border strips
/// are applied last so preprocessing has real work to do.
/// Throws ParamError for invalid specs or layouts that cannot fit the page.
GeneratedPage generate_page(const PageSpec& spec);

/// One dataset record. In a saved manifest the paths are written verbatim
/// (the generator uses bare filenames next to the manifest); load_manifest
/// resolves relative paths against the manifest's directory.
struct ManifestEntry {
  std::string image_path;
  std::string truth_path;
  std::string digest;  ///< human-readable PageSpec summary, no tabs
};

struct DatasetManifest {
  std::string split;  ///< "train" or "test"
  std::vector<ManifestEntry> entries;
};

/// Compact one-token description of a spec, embedded in manifests.
std::string spec_digest(const PageSpec& spec);

/// Deterministic per-page spec: seed from a splitmix64 derivation of
/// (master_seed, page_index), structure cycling free/form/table, and
/// moderate random variation of the content knobs. Pages of one corpus use
/// global indices 0..n_train-1 (train) and n_train..n_train+n_test-1 (test).
PageSpec derive_page_spec(std::uint64_t master_seed, int page_index);

struct CorpusOutput {
  DatasetManifest train;  ///< entry paths resolved against out_dir
  DatasetManifest test;
  std::filesystem::path train_manifest;
  std::filesystem::path test_manifest;
};

/// Generates n_train + n_test pages under out_dir (created if missing) and
/// writes train.manifest / test.manifest beside the images. Deterministic in
/// master_seed: same seed twice gives byte-identical files.
CorpusOutput generate_corpus(int n_train, int n_test, std::uint64_t master_seed,
                             const std::filesystem::path& out_dir);

/// Writes a manifest: '#' comment header carrying the split tag, then one
/// tab-separated record (image, truth, digest) per line.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Parses a manifest, resolving relative entry paths against the manifest's
/// directory. Throws FormatError on malformed lines and IoError when the
/// manifest or a referenced file is missing.
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace hpsep
