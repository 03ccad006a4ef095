import { describe, expect, it } from "vitest";
import { buildModel, recurrentLayerNames, DEFAULT_CONFIG, ModelConfig } from "../src/model.js";
import { initialLoss } from "../src/train.js";
import { preprocess } from "../src/encode.js";
import { ABC_ROLES, abcLog } from "./helpers.js";

function config(partial: Partial<ModelConfig>): ModelConfig {
  return { ...DEFAULT_CONFIG, hiddenUnits: 12, embeddingDims: 4, epochs: 1, ...partial };
}

describe("architecture structure", () => {
  it("full_shared has exactly one recurrent layer over all four inputs", () => {
    const model = buildModel(config({ architecture: "full_shared" }), 5, 5);
    expect(recurrentLayerNames(model)).toEqual(["shared_tower"]);
    expect(model.inputs.length).toBe(4);
  });

  it("shared_categorical shares one tower and keeps two time towers", () => {
    const model = buildModel(config({ architecture: "shared_categorical" }), 5, 5);
    expect(recurrentLayerNames(model).sort()).toEqual([
      "categorical_tower",
      "duration_tower",
      "wait_tower",
    ]);
  });

  it("specialized keeps four separate towers", () => {
    const model = buildModel(config({ architecture: "specialized" }), 5, 5);
    expect(recurrentLayerNames(model).sort()).toEqual([
      "activity_tower",
      "duration_tower",
      "role_tower",
      "wait_tower",
    ]);
  });

  it("honors the cell choice", () => {
    const lstm = buildModel(config({ cell: "lstm" }), 5, 5);
    const gru = buildModel(config({ cell: "gru" }), 5, 5);
    const classes = (m: ReturnType<typeof buildModel>) =>
      m.layers.map((l) => l.getClassName());
    expect(classes(lstm)).toContain("LSTM");
    expect(classes(gru)).toContain("GRU");
  });

  it("has three heads with the right widths", () => {
    const model = buildModel(config({}), 7, 4);
    const shapes = model.outputs.map((o) => o.shape[1]);
    expect(shapes).toEqual([7, 4, 2]);
  });
});

describe("seeding", () => {
  it("same seed gives identical initial loss", async () => {
    const dataset = preprocess(abcLog(20), ABC_ROLES, 5);
    const cfg = config({ seed: 77 });
    const a = await initialLoss(dataset, cfg);
    const b = await initialLoss(dataset, cfg);
    expect(a).toBe(b);
  });

  it("different seeds give different initial loss", async () => {
    const dataset = preprocess(abcLog(20), ABC_ROLES, 5);
    const a = await initialLoss(dataset, config({ seed: 1 }));
    const b = await initialLoss(dataset, config({ seed: 2 }));
    expect(a).not.toBe(b);
  });
});
