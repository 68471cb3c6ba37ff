#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "myo/baseline.hpp"
#include "myo/evaluation.hpp"
#include "myo/preprocess.hpp"
#include "myo/synth.hpp"
#include "myo/train.hpp"

namespace myo {

inline constexpr int kRecordingFormatVersion = 1;

enum class RecordingKind { raw, preprocessed };
std::string to_string(RecordingKind k);

/// On-disk recording: a magic/version line, a JSON header, an end-of-header
/// line, then the payload as a little-endian u64 byte count followed by
/// row-major little-endian float64 values. Ground-truth fibres, when present,
/// follow as a second block of the same form (6 values per fibre: iz, v,
/// length, depth, lateral_offset, z_start).
struct RecordingFile {
    RecordingKind kind = RecordingKind::raw;
    Matrix data;  ///< n_E x k (raw) or (n_E - 2) x k (preprocessed)
    ElectrodeArray array;
    SamplingGrid grid;
    std::optional<MotorUnit> ground_truth;
    std::vector<double> channel_min;  ///< preprocessed only
    std::vector<double> channel_max;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::string> provenance;  ///< processing steps in order
    int muscle_id = 0;
    int mu_index = 0;

    void validate() const;
    Recording to_recording() const;  ///< raw kind only
    PreprocessedRecording to_preprocessed() const;  ///< preprocessed kind only
};

void write_recording(std::ostream& out, const RecordingFile& file);
RecordingFile read_recording(std::istream& in);
void write_recording(const std::filesystem::path& path, const RecordingFile& file);
RecordingFile read_recording(const std::filesystem::path& path);

/// Every tunable of the pipeline, one section per component.
struct RunConfig {
    SynthConfig synth;
    ArrayConfig array;
    VolumeConductorConfig conductor;
    PreprocessConfig preprocess;
    EncoderConfig encoder;
    TrainConfig train;
    BaselineConfig baseline;
    LandscapeGrid landscape;

    void validate() const;
};

/// Canonical JSON (sorted keys, all fields present). Infinite SNR is written
/// as null.
std::string run_config_to_json(const RunConfig& cfg);
/// Starts from defaults; unknown keys and wrong types are ConfigErrors.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
/// 16 hex digits of FNV-1a over the canonical JSON.
std::string config_hash(const RunConfig& cfg);

struct Checkpoint {
    EncoderConfig encoder;
    std::size_t input_size = 0;
    std::vector<double> params;
    EstimatedParams estimate;
    LossBreakdown loss;
    int best_epoch = 0;
    std::uint64_t seed = 0;
    std::string config_hash;

    EncoderState state() const { return EncoderState(encoder, input_size, params); }
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Exclusive claim on an output directory, released on destruction. A second
/// claim on the same directory fails with FormatError(io).
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path file_;
};

}  // namespace myo
