#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gaitpipe {

// One radar detection. Radar at the origin, y is boresight into the room,
// z = 0 at the mount height. s is the Doppler radial speed (negative when
// the scatterer approaches the radar).
struct RadarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double s = 0.0;

  friend bool operator==(const RadarPoint&, const RadarPoint&) = default;
};

struct Frame {
  double t = 0.0;  // seconds since session start
  std::vector<RadarPoint> points;

  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class Site { clinic, home };

const char* to_string(Site site);
Site site_from_string(const std::string& text);

struct Session {
  double frame_rate = 10.0;
  Site site = Site::home;
  std::string room_label;
  std::string device_id;
  std::vector<Frame> frames;

  friend bool operator==(const Session&, const Session&) = default;
};

struct ReadReport {
  Session session;
  std::size_t dropped_points = 0;  // y < 0 returns discarded at ingest
};

/// Parses the JSONL frame format. Throws FormatError (with the 1-based line)
/// on schema violations and NonMonotonicTimeError when frame times do not
/// strictly increase.
ReadReport parse_session(std::istream& in);
ReadReport read_session(const std::filesystem::path& path);

/// Writes the header line and one line per frame with 6-decimal fixed-point
/// numbers. Throws IoError.
void write_session(const Session& session, std::ostream& out);
void write_session(const Session& session, const std::filesystem::path& path);

/// Rounds to the 6-decimal grid of the file format, so that values passed
/// through this function survive a write/read round trip bit-for-bit.
double quantize6(double value);

/// Fixed-point rendering with `digits` fractional digits ("-0.000000" is
/// normalised to "0.000000").
std::string format_fixed(double value, int digits = 6);

/// Writes `content` to `path` through a sibling temp file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace gaitpipe
