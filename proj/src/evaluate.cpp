#include "hpsep/evaluate.hpp"

#include "hpsep/errors.hpp"

namespace hpsep {

long long ScoreReport::labeled_total() const {
  return truth_pixels[0] + truth_pixels[1] + truth_pixels[2];
}

long long ScoreReport::correct_total() const {
  return correct_pixels[0] + correct_pixels[1] + correct_pixels[2];
}

ScoreReport rate(const LabelRaster& predicted, const GroundTruthMap& truth) {
  if (predicted.width() != truth.width() || predicted.height() != truth.height())
    throw ParamError("rate: raster dimensions do not match");
  ScoreReport report;
  for (int y = 0; y < truth.height(); ++y)
    for (int x = 0; x < truth.width(); ++x) {
      const std::uint8_t t = truth.get(x, y);
      if (t == 0 || t > 3) continue; // background / out-of-range are not scored
      report.truth_pixels[t - 1] += 1;
      if (predicted.get(x, y) == t) report.correct_pixels[t - 1] += 1;
    }
  for (int c = 0; c < 3; ++c)
    report.rates[c] = report.truth_pixels[c] > 0
                          ? static_cast<double>(report.correct_pixels[c]) /
                                static_cast<double>(report.truth_pixels[c])
                          : 1.0;
  report.micro_average = report.labeled_total() > 0
                             ? static_cast<double>(report.correct_total()) /
                                   static_cast<double>(report.labeled_total())
                             : 1.0;
  return report;
}

LabelRaster project_labels(const std::vector<LabeledWord>& words, const BinaryImage& image) {
  LabelRaster out(image.width(), image.height());
  // Unowned ink defaults to Noise; words then overwrite their own pixels.
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      if (image.get(x, y)) out.set(x, y, static_cast<std::uint8_t>(LabelClass::Noise));
  for (const LabeledWord& lw : words) {
    const std::uint8_t code = static_cast<std::uint8_t>(lw.label);
    for (const ConnectedComponent& cc : lw.word.components)
      for (int y = 0; y < cc.pixel_mask.height(); ++y)
        for (int x = 0; x < cc.pixel_mask.width(); ++x)
          if (cc.pixel_mask.get(x, y))
            out.set(cc.bbox.x_min + x, cc.bbox.y_min + y, code);
  }
  return out;
}

}  // namespace hpsep
