export { Rng, mix64, sampleIndex } from "./rng.js";
export { readLog, writeLog, parseTimestamp, formatTimestamp } from "./csv.js";
export type { LogEvent, LogTrace } from "./csv.js";
export {
  chooseScalingMode,
  fitScaler,
  invert,
  scale,
  LOG_SCALING_CV_THRESHOLD,
} from "./scaling.js";
export type { Scaler, ScalingMode } from "./scaling.js";
export { START_TOKEN, loadRoles, preprocess, roleOf } from "./encode.js";
export type { EncodedDataset, FirstEvent, RoleMap } from "./encode.js";
export { buildModel, recurrentLayerNames, DEFAULT_CONFIG } from "./model.js";
export type { Architecture, Cell, ModelConfig } from "./model.js";
export { train, initialLoss, saveModel, loadModel, datasetTensors } from "./train.js";
export type { TrainedModel, TrainedModelMeta } from "./train.js";
export { generateLog } from "./generate.js";
export type { GeneratedLog, GenerateOptions } from "./generate.js";
export { loadSpec, sampleSpec } from "./sampling.js";
export type { DistributionSpec } from "./sampling.js";
export {
  randomSearch,
  temporalSplit,
  historyDocument,
  DEFAULT_SEARCH_SPACE,
} from "./search.js";
export type { SearchOptions, SearchResult, SearchSpace, TrialRecord } from "./search.js";
