export {
  RewardClient,
  RewardServiceError,
  wireJson,
  type RewardBreakdown,
  type RewardClientConfig,
} from './rewardClient.js';
export {
  DATASETS,
  SampleRecordSchema,
  SampleSchemaError,
  iterSamples,
  loadSamples,
  type SampleRecord,
} from './sampleLoader.js';
