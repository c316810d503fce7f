#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mot/appearance.hpp"
#include "mot/camera.hpp"
#include "mot/model.hpp"

namespace mot {

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// VisDrone MOT rows: frame,target_id,left,top,width,height,score,category,
// truncation,occlusion. Readers accept 8 to 10 columns and report malformed
// rows as InputError citing the 1-based line number.

// Detections in (frame, det_idx) order, where det_idx is the row's ordinal
// among rows of the same frame in file order. target_id is ignored. Rows
// whose category is not in `classes` are dropped after det_idx assignment.
std::vector<Detection> read_detections(std::istream& in, const ClassMap& classes);

// Tracklet file: rows grouped by target id, entries carry their own fine
// class and raw score.
std::vector<Tracklet> read_tracklets(std::istream& in, const ClassMap& classes);

// Result file: rows grouped by (target id, category) into single-label
// trajectories with vote weight 1. With `drop_zero_score`, rows whose score
// column is 0 are skipped (ground-truth "ignore" flag).
std::vector<Trajectory> read_results(std::istream& in, bool drop_zero_score = false);

// Detections in the given order with target id -1.
void write_detections(std::ostream& out, std::span<const Detection> detections);

// Writes one row per entry with the entry's own class and score.
void write_tracklets(std::ostream& out, std::span<const Trajectory> trajectories);
void write_tracklets(std::ostream& out, std::span<const Tracklet> tracklets);

// Writes one row per (entry, vote) with score * weight; unvoted trajectories
// are written as in write_tracklets. Rows are ordered by (frame, id, category).
void write_results(std::ostream& out, std::span<const Trajectory> trajectories);

// Sidecar `dim=D` header, then `frame,key,v0,...,v{D-1}` per line. Vectors
// are normalized on load unless already unit length within 1e-9.
EmbeddingStore read_embeddings(std::istream& in);
void write_embeddings(std::ostream& out, const EmbeddingStore& store);

// `frame,a11,a12,a21,a22,tx,ty` per line.
TransformTable read_transforms(std::istream& in);
void write_transforms(std::ostream& out, const TransformTable& table);

// File wrappers; errors are prefixed with the path.
std::vector<Detection> load_detections(const std::filesystem::path& path, const ClassMap& classes);
std::vector<Tracklet> load_tracklets(const std::filesystem::path& path, const ClassMap& classes);
std::vector<Trajectory> load_results(const std::filesystem::path& path, bool drop_zero_score = false);
EmbeddingStore load_embeddings(const std::filesystem::path& path);
TransformTable load_transforms(const std::filesystem::path& path);

void save_detections(const std::filesystem::path& path, std::span<const Detection> detections);
void save_tracklets(const std::filesystem::path& path, std::span<const Trajectory> trajectories);
void save_tracklets(const std::filesystem::path& path, std::span<const Tracklet> tracklets);
void save_results(const std::filesystem::path& path, std::span<const Trajectory> trajectories);
void save_embeddings(const std::filesystem::path& path, const EmbeddingStore& store);
void save_transforms(const std::filesystem::path& path, const TransformTable& table);
void save_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mot
