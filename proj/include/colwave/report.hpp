#pragma once

#include <filesystem>
#include <string>

#include "colwave/scenario.hpp"

namespace colwave {

struct ReportOptions {
    /// Also dump the solution family (manifest plus float64 arrays).
    bool write_fields = true;
};

/// Writes metrics.csv, verdict.txt, rays.csv, probes.csv, energy.csv,
/// association.csv and overlay.svg into dir (created if needed); the family
/// goes to dir/family. Only files whose analysis ran are written.
/// Output depends on the run result only, so identical runs give identical files.
void write_report(const RunResult& res, const std::filesystem::path& dir, const ReportOptions& opt = {});

/// Human-readable summary: metrics, ray verdicts, notes.
std::string verdict_text(const RunResult& res);

/// Fixed "%.10g" rendering used by every CSV.
std::string fmt(double v);

}  // namespace colwave
