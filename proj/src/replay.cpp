#include "mcon/replay.hpp"

#include "mcon/design_io.hpp"
#include "mcon/hash.hpp"

namespace mcon {

namespace {

std::string pose_text(Pose p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

ReplayVerdict fail(std::size_t step, std::string message) { return {ReplayStatus::Fail, step, std::move(message)}; }

bool digest_matches(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
  const auto cut = body.rfind('\n');
  if (cut == std::string_view::npos) return false;
  const std::string_view prefix = text.substr(0, cut + 1);
  auto footer = nlohmann::json::parse(body.substr(cut + 1), nullptr, false);
  if (footer.is_discarded() || !footer.contains("digest") || !footer["digest"].is_string()) return false;
  const std::string digest = footer["digest"].get<std::string>();
  footer.erase("digest");
  // Re-serialization must reproduce the stored footer byte for byte.
  nlohmann::json rebuilt = footer;
  rebuilt["digest"] = digest;
  if (rebuilt.dump() != body.substr(cut + 1)) return false;
  return digest == "fnv1a64:" + hex64(fnv1a64(footer.dump(), fnv1a64(prefix)));
}

}  // namespace

std::string_view to_string(ReplayStatus status) {
  switch (status) {
    case ReplayStatus::Ok: return "OK";
    case ReplayStatus::Fail: return "FAIL";
    case ReplayStatus::Incompatible: return "INCOMPATIBLE";
    case ReplayStatus::Malformed: return "MALFORMED";
  }
  return "?";
}

ReplayVerdict replay_text(std::string_view text) {
  EpisodeRecord rec;
  try {
    rec = record_from_text(text);
  } catch (const RecordError& e) {
    const auto status = e.kind() == RecordError::Kind::Incompatible ? ReplayStatus::Incompatible : ReplayStatus::Malformed;
    return {status, std::nullopt, e.what()};
  }

  EnvState state;
  try {
    state = reset(rec.cfg, std::make_shared<const Design>(rec.design));
  } catch (const ContractError& e) {
    return {ReplayStatus::Malformed, std::nullopt, std::string("cannot reset from header: ") + e.what()};
  }
  if (state.pose != rec.initial_pose)
    return {ReplayStatus::Fail, std::nullopt,
            "initial pose " + pose_text(rec.initial_pose) + " but simulator starts at " + pose_text(state.pose)};

  for (std::size_t i = 0; i < rec.steps.size(); ++i) {
    const StepRecord& s = rec.steps[i];
    if (state.done) return fail(i, "record continues after the episode ended");
    StepOutcome out;
    try {
      out = step(state, s.action, rec.cfg);
    } catch (const std::exception& e) {
      return fail(i, e.what());
    }
    if (state.n_steps != s.n_steps) return fail(i, "Ns mismatch");
    if (state.pose != s.pose) return fail(i, "pose " + pose_text(s.pose) + " but simulator reached " + pose_text(state.pose));
    if (out.sampled_distance != s.sampled_distance) return fail(i, "sampled distance mismatch");
    if (out.reward != s.reward)
      return fail(i, "reward " + std::to_string(s.reward) + " but simulator gave " + std::to_string(out.reward));
    if (state.n_bricks != s.n_bricks) return fail(i, "Nb mismatch");
  }

  const std::size_t footer = rec.steps.size();
  const bool ended_early = rec.aborted() || rec.done_reason == DoneReason::Resigned;
  if (ended_early ? state.done : (!state.done || state.done_reason != rec.done_reason))
    return fail(footer, "done reason " + std::string(to_string(rec.done_reason)) + " but simulator reports " +
                            std::string(to_string(state.done_reason)));
  if (ended_early && rec.aborted() && rec.done_reason != DoneReason::None)
    return fail(footer, "aborted episode must have done reason none");
  if (rec.final_grid.rows() != state.grid.cells.rows() || rec.final_grid.cols() != state.grid.cells.cols() ||
      (rec.final_grid != state.grid.cells).any())
    return fail(footer, "final grid mismatch");
  const double score = iou(state.grid, *state.design);
  if (score != rec.iou) return fail(footer, "IoU mismatch");
  if (!digest_matches(text)) return fail(footer, "digest mismatch");
  return {ReplayStatus::Ok, std::nullopt, "verified " + std::to_string(rec.steps.size()) + " steps"};
}

ReplayVerdict replay(const std::filesystem::path& record_path) {
  std::string text;
  try {
    text = read_text_file(record_path);
  } catch (const std::exception& e) {
    return {ReplayStatus::Malformed, std::nullopt, e.what()};
  }
  return replay_text(text);
}

}  // namespace mcon
