const { CosmosClient } = require('@azure/cosmos');

const client = new CosmosClient(process.env.COSMOS_CONN);

exports.handler = async (event) => {
  const container = client.database('appdb').container('events');
  await container.items.create({ id: event.id, kind: event.kind });
  return { recorded: true };
};
