const { CosmosClient } = require('@azure/cosmos');

const client = new CosmosClient(process.env.COSMOS_CONN);

exports.handler = async (event) => {
  const container = client.database('appdb').container('events');
  const { resource } = await container.item(event.id, event.kind).read();
  return resource;
};
